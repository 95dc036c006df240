//! Definition language and command layer for the vertexkit toolkit.
//!
//! The library half hosts the parser (`ast`, `lexer`, `parser`), the
//! lowering into domain objects (`lower`), the built-in example inputs
//! (`builtins`), the report format (`report`), and the subcommand
//! implementations (`commands`); the binary in `main.rs` is a thin shell
//! around `commands::run`.

pub mod ast;
pub mod builtins;
pub mod commands;
pub mod lexer;
pub mod lower;
pub mod parser;
pub mod report;
