//! Compile and run a C client against the generated header and static library.

use std::path::{Path, PathBuf};
use std::process::Command;

const CLIENT: &str = r#"
#include <math.h>
#include <stdio.h>
#include "projhull.h"

int main(void) {
    PhCompactum *k = NULL;
    if (ph_compactum_circle(64, 1.0, &k) != PH_STATUS_OK) return 10;
    PhComplex x[2] = {{1.0, 0.0}, {0.0, 0.0}};
    PhBracket b;
    if (ph_truncated_extremal(k, x, 2, 2, &b) != PH_STATUS_OK) return 11;
    if (fabs(b.lo - 0.5 * log(2.0)) > 1e-9) return 12;
    if (ph_truncated_extremal(NULL, x, 2, 2, &b) != PH_STATUS_NULL_POINTER) return 13;
    if (ph_last_error()[0] == '\0') return 14;
    ph_compactum_free(k);
    printf("%s\n", ph_version());
    return 0;
}
"#;

fn static_lib() -> Option<PathBuf> {
    // target/<profile>/deps/header-xxxx -> target/<profile>/libprojhull_ffi.a
    let exe = std::env::current_exe().ok()?;
    let lib = exe.parent()?.parent()?.join("libprojhull_ffi.a");
    lib.exists().then_some(lib)
}

#[test]
fn c_client_links_and_runs() {
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    assert!(include.join("projhull.h").exists());
    let tmp = std::env::temp_dir().join(format!("projhull-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&tmp).unwrap();
    let src = tmp.join("client.c");
    std::fs::write(&src, CLIENT).unwrap();

    let Some(lib) = static_lib() else {
        // header still has to parse as C
        let st = Command::new("cc").args(["-fsyntax-only", "-I"]).arg(&include).arg(&src).status().unwrap();
        assert!(st.success());
        return;
    };
    let bin = tmp.join("client");
    let st = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .status()
        .expect("cc available");
    assert!(st.success());
    let out = Command::new(&bin).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), env!("CARGO_PKG_VERSION"));
    let _ = std::fs::remove_dir_all(&tmp);
}
