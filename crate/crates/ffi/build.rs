fn main() {
    let crate_dir = std::env::var("CARGO_MANIFEST_DIR").unwrap();
    let mut config = cbindgen::Config::default();
    config.language = cbindgen::Language::C;
    config.pragma_once = true;
    config.documentation = true;
    config.cpp_compat = true;
    config.enumeration.prefix_with_name = true;
    cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .generate()
        .expect("cbindgen failed")
        .write_to_file(std::path::Path::new(&crate_dir).join("include").join("esgpipe.h"));
    println!("cargo:rerun-if-changed=src/lib.rs");
}
