fn main() {
    let dir = tempfile::tempdir().expect("temporary directory");
    let outcomes = entropic_validation::run_all(dir.path(), |o| println!("{o}"));
    let failed: Vec<usize> = outcomes.iter().filter(|o| !o.passed()).map(|o| o.index).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", outcomes.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
