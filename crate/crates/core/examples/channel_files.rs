//! Load channel descriptions from JSON and check which region evaluators
//! apply; a non-injective interference map is reported with a witness.

use std::path::Path;

use icregion::channels::{Channel, ChannelFile, InjectiveInterference};

fn injectivity(c: &impl InjectiveInterference) -> String {
    match c.check_injectivity() {
        Some(w) => format!("not injective: {w}"),
        None => "injective".into(),
    }
}

fn main() -> anyhow::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/channels");
    let mut paths: Vec<_> = std::fs::read_dir(&dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()?;
    paths.sort();
    for path in paths {
        let file: ChannelFile = serde_json::from_str(&std::fs::read_to_string(&path)?)?;
        let name = path.file_name().unwrap().to_string_lossy();
        match file.into_channel() {
            Ok(ch) => {
                let note = match &ch {
                    Channel::Sdzic(c) => injectivity(c),
                    Channel::Cribbing(c) => injectivity(c),
                    Channel::StateCribbing(c) => injectivity(c),
                    Channel::Modulo(m) => format!("alphabet size {}", m.alphabet_size()),
                    Channel::General(g) => format!("{} transition rows", g.rows().len()),
                };
                println!("{name:24} {:20} {note}", ch.kind());
            }
            Err(e) => println!("{name:24} rejected: {e}"),
        }
    }
    Ok(())
}
