//! Offline planning of laser scan positions for cooperating ground and
//! aerial robots.
//!
//! A survey starts from a rough model of the site, either reconstructed from
//! a quick noisy walk-through ([`meshify`]) or supplied as an existing mesh.
//! The model surface is cut into area samples, candidate scanner positions
//! are generated for both robot classes, and a visibility matrix records
//! which candidate sees which sample ([`visibility`]). [`solver`] chooses a
//! small set of viewpoints, ground first and aerial for whatever remains, and
//! [`tour`] orders each class's viewpoints into a short path. [`sim`] scans a
//! reference mesh from the chosen viewpoints and measures what was really
//! covered; [`pipeline`] repeats the cycle on the improving model.

pub mod config;
pub mod geometry;
pub mod io;
pub mod meshify;
pub mod pipeline;
pub mod plan;
pub mod scenes;
pub mod sim;
pub mod solver;
pub mod tour;
pub mod visibility;
