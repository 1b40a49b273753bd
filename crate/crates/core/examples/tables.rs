//! Prints the optimal norm for every pattern class of a few segment lengths.
use mrhinf::{design::first_order_lag, search, BaseSpec, SynthesisOptions};

fn main() -> mrhinf::Result<()> {
    let base = BaseSpec { h: 1.0, m: None, n: 4, f: first_order_lag(10.0) };
    let opts = SynthesisOptions::default();
    for (m, counts) in [(4, vec![2]), (5, vec![1, 2, 3, 4]), (7, vec![4])] {
        let t = std::time::Instant::now();
        let reports = search::search_counts(m, &counts, &base, &opts, None)?;
        print!("{}", search::format_table(&reports));
        println!("M={m}: {:.1?}\n", t.elapsed());
    }
    Ok(())
}
