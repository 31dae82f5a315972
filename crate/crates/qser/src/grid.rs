//! Parallel grid search and its results file.

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use qser_core::train::{evaluate_point, rank, GridContext, GridResult, GridSpace, PointStatus};

use crate::error::{Error, Result};

/// Evaluates every point of `space` on `workers` threads and ranks the
/// results. Each point trains single-threaded from the same seed, so the
/// outcome does not depend on `workers`.
pub fn run_grid(space: &GridSpace, ctx: &GridContext<'_>, workers: usize) -> Result<Vec<GridResult>> {
    run_grid_with(space, ctx, workers, |_| {})
}

/// [`run_grid`] with a callback invoked as each point finishes (in
/// completion order).
pub fn run_grid_with(
    space: &GridSpace,
    ctx: &GridContext<'_>,
    workers: usize,
    on_point: impl Fn(&GridResult) + Sync,
) -> Result<Vec<GridResult>> {
    if space.is_empty() {
        return Err(Error::Config { field: "grid.space".into(), message: "grid is empty".into() });
    }
    let n = space.len();
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<GridResult>>> = Mutex::new(vec![None; n]);
    std::thread::scope(|s| {
        for _ in 0..workers.clamp(1, n) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(point) = space.point(i) else { break };
                let result = evaluate_point(&point, ctx);
                on_point(&result);
                slots.lock().unwrap()[i] = Some(result);
            });
        }
    });
    let mut results: Vec<GridResult> = slots.into_inner().unwrap().into_iter().flatten().collect();
    rank(&mut results);
    Ok(results)
}

pub const CSV_HEADER: [&str; 10] = [
    "point_index",
    "lr",
    "optimizer",
    "weight_decay",
    "embedding",
    "circuit",
    "measurement",
    "val_uar",
    "params",
    "status",
];

/// One row per point, in the given (ranked) order.
pub fn write_grid_csv(path: &Path, results: &[GridResult]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::format(path, e.to_string()))?;
    let csv_err = |e: csv::Error| Error::format(path, e.to_string());
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in results {
        let p = &r.point;
        let status = match &r.status {
            PointStatus::Ok => "ok".to_string(),
            PointStatus::Failed(msg) => format!("failed: {msg}"),
        };
        w.write_record([
            p.index.to_string(),
            p.learning_rate.to_string(),
            p.optimizer.name().to_string(),
            p.weight_decay.to_string(),
            p.embedding.name().to_string(),
            p.circuit.name().to_string(),
            p.measurement.name().to_string(),
            r.val_uar.map(|u| u.to_string()).unwrap_or_default(),
            r.params.to_string(),
            status,
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
