use anyhow::Result;
use connotation::diagnostics::gradient_suite;
use serde_json::json;

use super::csv_lines;
use crate::run::Run;
use crate::table::render;

pub fn grad_check(run: Run) -> Result<()> {
    let gc = run.config.grad_check.clone();
    let rows = gradient_suite(gc.instances, run.seed(), gc.step);
    let csv = csv_lines("operation,instances,max_rel_error,passed", &rows, |r| {
        format!("{},{},{:.3e},{}", r.operation, r.instances, r.max_rel_error, r.max_rel_error < gc.tolerance)
    });
    let failed: Vec<&str> = rows.iter().filter(|r| !(r.max_rel_error < gc.tolerance)).map(|r| r.operation.as_str()).collect();
    let mut run = run;
    run.write("grad_check.csv", csv)?;
    let table = render(
        &["operation", "instances", "max rel error", "ok"],
        &rows
            .iter()
            .map(|r| {
                let ok = if r.max_rel_error < gc.tolerance { "yes" } else { "NO" };
                vec![r.operation.clone(), r.instances.to_string(), format!("{:.3e}", r.max_rel_error), ok.to_string()]
            })
            .collect::<Vec<_>>(),
    );
    let summary = json!({ "step": gc.step, "tolerance": gc.tolerance, "rows": rows, "failed": failed });
    run.finish(summary, &table)?;
    if !failed.is_empty() {
        anyhow::bail!("gradient check failed for {}", failed.join(", "));
    }
    Ok(())
}
