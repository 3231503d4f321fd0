#![no_main]

use chdg::mesh::{parse_msh, write_msh_string};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    // Anything accepted must survive a write/read round trip.
    if let Ok(mesh) = parse_msh(text) {
        let again = parse_msh(&write_msh_string(&mesh)).expect("re-reading a written mesh");
        assert_eq!(again.triangles, mesh.triangles);
        assert_eq!(again.regions, mesh.regions);
        assert_eq!(again.num_faces(), mesh.num_faces());
    }
});
