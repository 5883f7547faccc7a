//! Command line front end and HTTP service for the misère tree search game.

pub mod api;
pub mod commands;
