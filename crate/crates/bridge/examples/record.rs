//! Fetches ray class data from the backend named by TETRASIEVE_BACKEND and
//! records it in a fixture store.
//!
//!     TETRASIEVE_BACKEND="python3 tools/gp-shim.py" \
//!         cargo run -p tetra-bridge --example record -- fixtures 163 277

use std::path::PathBuf;

use tetra_bridge::{condition3_and_4, fetch_rayclass, record_fixture, BackendConfig, FetchMode};

fn main() {
    let mut args = std::env::args().skip(1);
    let store = PathBuf::from(args.next().expect("usage: record STORE ELL..."));
    let config = BackendConfig::from_env()
        .expect("backend configuration")
        .expect("TETRASIEVE_BACKEND is not set");
    let mode = FetchMode::Live(config);
    for ell in args {
        let ell: u64 = ell.parse().expect("ell must be an integer");
        match fetch_rayclass(ell, &mode) {
            Ok(f) => {
                let (m, n, ram_ok) = condition3_and_4(&f).expect("fetched fixtures are valid");
                let path = record_fixture(&f, &store).expect("write fixture");
                println!("{ell}: dim {} m {m} n {n} ram_ok {ram_ok} -> {}", f.dim, path.display());
            }
            Err(e) => println!("{ell}: {e}"),
        }
    }
}
