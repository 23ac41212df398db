pub mod cover;
pub mod dsl;
pub mod embed;
pub mod flats;
pub mod graphgroups;
pub mod lattice;
pub mod stallings;
pub mod tower;
pub mod words;
