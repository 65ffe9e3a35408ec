//! The generated header must compile as C and C++ and declare the API.

use std::path::PathBuf;
use std::process::Command;

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/memoryflow.h")
}

#[test]
fn declares_every_entry_point() {
    let text = std::fs::read_to_string(header()).unwrap();
    for f in [
        "mf_kernel_new", "mf_kernel_new_tabulated", "mf_kernel_free", "mf_kernel_density", "mf_kernel_mass",
        "mf_kernel_first_moment", "mf_kernel_symbol", "mf_weights_new", "mf_weights_free", "mf_weights_len",
        "mf_weights_get", "mf_weights_apply", "mf_msd_solve", "mf_fundamental", "mf_last_error_message",
    ] {
        assert!(text.contains(&format!("{f}(")), "missing {f}");
    }
    assert!(text.contains("typedef struct MfKernel MfKernel;"));
    assert!(text.contains("MF_STATUS_OK = 0"));
}

#[test]
fn compiles_as_c_and_cxx() {
    let dir = tempfile_dir();
    let src = dir.join("use.c");
    std::fs::write(
        &src,
        "#include \"memoryflow.h\"\nint f(void) { MfKernel *k = 0; double m; \
         return mf_kernel_mass(k, &m) == MF_STATUS_NULL_POINTER ? 0 : 1; }\n",
    )
    .unwrap();
    let include = header().parent().unwrap().to_path_buf();
    for (cc, lang) in [("cc", "c"), ("c++", "c++")] {
        let status = match Command::new(cc)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang, "-I"])
            .arg(&include)
            .arg(&src)
            .status()
        {
            Ok(s) => s,
            Err(_) => {
                eprintln!("{cc} not available; skipping");
                continue;
            }
        };
        assert!(status.success(), "{cc} rejected the header");
    }
}

fn tempfile_dir() -> PathBuf {
    let d = std::env::temp_dir().join(format!("memoryflow-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}
