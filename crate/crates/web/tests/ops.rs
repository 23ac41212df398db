use serde_json::Value;

const HOST: &str = include_str!("../../../towers/genus2host.rft");

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn present_reports_the_presentation() {
    let v = parse(rft_web::present(HOST));
    assert_eq!(v["presentation"], "< a,b,t | a b a^-1 b^-1 t b a b^-1 a^-1 t^-1 >");
    assert_eq!(v["height"], 1);
}

#[test]
fn word_problem_verdicts() {
    assert_eq!(parse(rft_web::word_problem(HOST, "[[a,b],t]"))["verdict"], "trivial");
    assert_eq!(parse(rft_web::word_problem(HOST, "[a,t]"))["verdict"], "nontrivial");
}

#[test]
fn core_of_the_genus_two_subgroup() {
    let v = parse(rft_web::core(HOST, "a; b; t a t^-1; t b t^-1"));
    assert_eq!(v["rank"], 4);
    assert_eq!(v["vertices"].as_array().unwrap().len(), 3);
}

#[test]
fn errors_are_json() {
    assert!(parse(rft_web::present("tower x {"))["error"].as_str().unwrap().contains("1:"));
    assert!(parse(rft_web::word_problem(HOST, "z"))["error"].is_string());
    assert!(parse(rft_web::core(HOST, " ; "))["error"].is_string());
}
