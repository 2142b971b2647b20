//! Regenerates `data/codo.ttl` from the built-in vocabulary.

fn main() -> std::io::Result<()> {
    let vocab = codo_core::schema::build_codo_vocabulary();
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/codo.ttl");
    std::fs::write(
        &path,
        codo_core::serialization::serialize_turtle(&vocab.graph),
    )?;
    println!("wrote {}", path.display());
    Ok(())
}
