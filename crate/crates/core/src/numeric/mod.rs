pub mod dd;
pub mod mat3;
