//! Online Age, the active-article set, the yearly growth series, and the
//! min-max platform-share matrix.
//!
//! ```bash
//! cargo run --release --example longevity_metrics
//! ```

use altspan::ingest::PubWindow;
use altspan::longevity::{
    active_set, first_last_mention, median_threshold_labels, online_age, platform_share_matrix,
    yearly_series,
};
use altspan::platform::ALL_PLATFORMS;
use altspan::synth::{generate_corpus, SynthConfig};

fn main() -> altspan::Result<()> {
    let config = SynthConfig {
        n_articles: 4_000,
        seed: 11,
        ..SynthConfig::default()
    };
    let (records, _) = generate_corpus(&config)?;

    // Online Age of the first dated article.
    let dated = records.iter().find(|r| r.has_dated_mentions()).unwrap();
    let (first, last) = first_last_mention(dated).unwrap();
    println!(
        "{}: first mention {first}, last mention {last}, Online Age {} months",
        dated.article_id(),
        online_age(first, last)?
    );

    // The active set: mentioned every year on >= 3 platforms through 2018.
    let window = PubWindow::new(1920, 2016)?;
    let active = active_set(&records, 2018, 3, window)?;
    println!("\nactive articles: {} of {}", active.len(), records.len());

    let ages: Vec<u32> = active.iter().map(|(_, lr)| lr.online_age_months).collect();
    let labeling = median_threshold_labels(&ages)?;
    println!(
        "median Online Age {} months; {} of {} at or above it",
        labeling.median_months,
        labeling.labels.iter().filter(|&&l| l == 1).count(),
        labeling.labels.len()
    );

    // Growth series, decade resolution.
    let series = yearly_series(&records);
    println!("\nyear  published  with_dates  mentions");
    for (i, &year) in series.years.iter().enumerate() {
        if year % 10 == 0 {
            println!(
                "{year}  {:>9}  {:>10}  {:>8}",
                series.published[i], series.with_dates[i], series.total_mentions[i]
            );
        }
    }

    // Which platform dominates each decade's mention share?
    let shares = platform_share_matrix(&records);
    println!("\ndominant platform by decade:");
    for (i, &year) in shares.years.iter().enumerate() {
        if year % 10 == 0 {
            let (argmax, _) = shares.normalized[i]
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap();
            let runner_up = {
                let mut row: Vec<(usize, f64)> =
                    shares.normalized[i].iter().copied().enumerate().collect();
                row.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
                ALL_PLATFORMS[row[1].0]
            };
            println!("  {year}: {} (then {runner_up})", ALL_PLATFORMS[argmax]);
        }
    }
    Ok(())
}
