//! Parse a JSON-lines mention corpus and apply the publication-window
//! filter, tallying every disposition.
//!
//! ```bash
//! cargo run --release --example ingest_and_stats
//! ```

use std::io::Write;

use altspan::ingest::{load_corpus, PubWindow};

fn main() -> altspan::Result<()> {
    // A small corpus with typical noise: an out-of-window year, a malformed
    // line, an unknown platform key, and epoch-seconds dates.
    let lines = r#"{"article_id":"a1","pubyear":2015,"counts":{"twitter":3,"mendeley":12},"first_seen":{"twitter":"2015-04-01"},"last_seen":{"twitter":"2017-09-30"}}
{"article_id":"a2","pubyear":1890,"counts":{"syllabi":2}}
{"article_id":"a3","pubyear":2010,"counts":{"patent":4,"friendster":9},"first_seen":{"patent":1262304000},"last_seen":{"patent":1483228800}}
this line is not JSON
{"article_id":"a4","pubyear":2001,"counts":{"news":1}}
"#;
    let path = std::env::temp_dir().join("altspan-example-ingest.jsonl");
    let mut file = std::fs::File::create(&path).map_err(|e| altspan::Error::io(&path, e))?;
    file.write_all(lines.as_bytes()).map_err(|e| altspan::Error::io(&path, e))?;

    let window = PubWindow::new(1920, 2016)?;
    let (records, stats) = load_corpus(&path, window)?;

    println!("kept {} records", records.len());
    println!("  total lines:        {}", stats.n_total);
    println!("  with mention dates: {}", stats.n_with_dates);
    println!("  dropped (window):   {}", stats.n_dropped_window);
    println!("  malformed:          {}", stats.n_malformed);
    println!("  unknown keys:       {}", stats.n_unknown_keys);

    for record in &records {
        println!(
            "\n{}: pubyear {}, {} total mentions, dated: {}",
            record.article_id(),
            record.publication_year(),
            record.total_mentions(),
            record.has_dated_mentions()
        );
    }
    // Epoch seconds and ISO text normalize to the same calendar dates.
    let a3 = records.iter().find(|r| r.article_id() == "a3").unwrap();
    println!(
        "\na3 patent dates normalized from epoch seconds: {} .. {}",
        a3.first_seen(altspan::PlatformId::Patent).unwrap(),
        a3.last_seen(altspan::PlatformId::Patent).unwrap()
    );
    Ok(())
}
