pub mod exactlin;
pub mod liealg;
pub mod tensorops;
pub mod wbgroup;
pub mod heckealg;
pub mod bcvw;
pub mod psmodel;
pub mod hermforms;
pub mod cli;
