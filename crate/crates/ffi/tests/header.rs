use std::path::{Path, PathBuf};
use std::process::Command;

fn manifest() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(manifest().join("include/welding.h")).unwrap();
    let src = std::fs::read_to_string(manifest().join("src/lib.rs")).unwrap();
    for line in src.lines().filter(|l| l.starts_with("pub unsafe extern \"C\" fn ")) {
        let name = line["pub unsafe extern \"C\" fn ".len()..].split('(').next().unwrap();
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
    assert!(header.contains("typedef struct WeldingField WeldingField;"));
}

fn static_lib() -> Option<PathBuf> {
    // target/<profile>/deps/<test exe> → target/<profile>/libwelding_ffi.a
    let exe = std::env::current_exe().ok()?;
    let lib = exe.parent()?.parent()?.join("libwelding_ffi.a");
    lib.exists().then_some(lib)
}

fn cc_available() -> bool {
    Command::new("cc").arg("--version").output().is_ok_and(|o| o.status.success())
}

#[test]
fn c_program_compiles_and_runs() {
    if !cc_available() {
        eprintln!("cc not found; skipping");
        return;
    }
    let dir = tempfile_dir();
    let inc = manifest().join("include");
    let src = manifest().join("tests/smoke.c");
    let syntax = Command::new("cc").args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"]).arg(&inc).arg(&src).status().unwrap();
    assert!(syntax.success());
    let Some(lib) = static_lib() else {
        eprintln!("static library not built; header checked only");
        return;
    };
    let exe = dir.join("smoke");
    let status = Command::new("cc")
        .arg("-I")
        .arg(&inc)
        .arg(&src)
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}

fn tempfile_dir() -> PathBuf {
    let d = Path::new(env!("CARGO_TARGET_TMPDIR")).join("ffi-smoke");
    std::fs::create_dir_all(&d).unwrap();
    d
}
