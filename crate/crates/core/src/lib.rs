pub mod arrangement;
pub mod coloring;
pub mod geom;
pub mod report;
pub mod trigroup;
