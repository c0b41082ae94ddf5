//! Command-line front end (placeholder while the kernel is built).
use std::ffi::OsString;

pub fn run<I: IntoIterator<Item = OsString>>(_args: I) -> i32 {
    eprintln!("not yet wired");
    2
}
