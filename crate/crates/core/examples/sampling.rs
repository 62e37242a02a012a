//! Draw a balanced labelled sample set from a benchmark language and write
//! it as JSON lines.
//!
//! `cargo run --example sampling -- S7 20`

use regrobust::bench::{build_sampler, generate, BenchmarkId};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let id: BenchmarkId = args.next().unwrap_or_else(|| "S7".into()).parse()?;
    let per_class: usize = args.next().map_or(Ok(10), |s| s.parse())?;
    println!("# {id}: {}", id.description());

    let mut sampler = build_sampler(id, 0.3, 16, 1)?;
    for _ in 0..3 {
        let (seq, label) = sampler.draw();
        let text: Vec<String> = seq.iter().map(ToString::to_string).collect();
        println!("# walk label={label} [{}]", text.join(", "));
    }

    let set = generate(&mut sampler, per_class, per_class)?;
    print!("{}", set.to_jsonl());
    Ok(())
}
