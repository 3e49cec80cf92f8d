use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use chroma_core::graph::{stats as graph_stats, write_csr_cache, write_edge_list};
use chroma_core::protocol::Mode;
use chroma_core::record::{run_coloring, RunConfig, VIOLATION_SAMPLE};
use chroma_core::verify::{verify_d1, verify_d2, verify_pd2_sources};
use chroma_core::{Color, Error};

use crate::{BenchArgs, ColorArgs, GenArgs, GraphFormat, RunArgs, SourceArgs, Switch, VerifyArgs};

pub const EXIT_OK: u8 = 0;
pub const EXIT_IMPROPER: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

/// Maps a library error to an exit code, reporting it on stderr.
fn fail(e: &Error) -> u8 {
    eprintln!("error: {e}");
    match e {
        Error::NonConvergence { .. } => EXIT_IMPROPER,
        _ => EXIT_USAGE,
    }
}

fn run_config(run: &RunArgs, mode: Mode, ranks: usize, seed: u64) -> RunConfig {
    RunConfig {
        source: run.source.source(),
        mode,
        ranks,
        partition: run.partition,
        seed,
        recolor_degrees: matches!(run.recolor_degrees, Switch::On),
        deterministic: run.deterministic,
        eb_threshold: run.eb_threshold,
        max_rounds: run.max_rounds,
        partial_count: run.partial_count,
    }
}

fn write_colors(path: &Path, colors: &[Color]) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for c in colors {
        writeln!(w, "{c}")?;
    }
    w.flush()
}

fn read_colors(path: &Path) -> chroma_core::Result<Vec<Color>> {
    let reader = BufReader::new(File::open(path)?);
    let mut colors = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        colors.push(t.parse().map_err(|_| Error::Parse {
            line: i + 1,
            message: format!("{t:?} is not a color"),
        })?);
    }
    Ok(colors)
}

pub fn color(a: ColorArgs) -> u8 {
    let cfg = run_config(&a.run, a.mode, a.ranks, a.run.seed);
    let out = match run_coloring(&cfg) {
        Ok(out) => out,
        Err(e) => return fail(&e),
    };
    let record = &out.record;
    if let Some(path) = &a.out {
        let written = File::create(path).map_err(Error::from).and_then(|f| {
            serde_json::to_writer_pretty(BufWriter::new(f), record).map_err(|e| Error::Io(e.into()))
        });
        if let Err(e) = written {
            return fail(&e);
        }
    }
    if let Some(path) = &a.colors_out {
        if let Err(e) = write_colors(path, &out.coloring) {
            return fail(&e.into());
        }
    }
    println!("{}", record.summary_line());
    if record.verification.proper {
        EXIT_OK
    } else {
        for v in &record.verification.sample {
            eprintln!("violation: {v}");
        }
        EXIT_IMPROPER
    }
}

pub fn verify(a: VerifyArgs) -> u8 {
    let checked = (|| {
        let instance = a.source.source().load(a.mode, a.seed)?;
        let colors = read_colors(&a.colors)?;
        let g = &instance.graph;
        match (a.mode, a.partial_count, instance.num_sources) {
            (Mode::D2, _, _) => verify_d2(g, &colors, false),
            (Mode::PD2, true, Some(s)) => verify_pd2_sources(g, &colors, s),
            (Mode::PD2, _, _) => verify_d2(g, &colors, true),
            _ => verify_d1(g, &colors),
        }
    })();
    match checked {
        Err(e) => fail(&e),
        Ok(violations) => {
            for v in violations.iter().take(VIOLATION_SAMPLE) {
                println!("violation: {v}");
            }
            println!("violations={}", violations.len());
            if violations.is_empty() {
                EXIT_OK
            } else {
                EXIT_IMPROPER
            }
        }
    }
}

#[derive(Serialize)]
struct BenchRow {
    mode: Mode,
    ranks: usize,
    seed: u64,
    rounds: usize,
    colors: usize,
    recolored_total: usize,
    bytes_sent: u64,
    comm_ms: f64,
    comp_ms: f64,
    total_ms: f64,
}

/// Microsecond resolution is plenty for wall-clock columns.
fn round_ms(ms: f64) -> f64 {
    (ms * 1e3).round() / 1e3
}

pub fn bench(a: BenchArgs) -> u8 {
    let mut csv = csv::Writer::from_writer(io::stdout().lock());
    let mut code = EXIT_OK;
    for &mode in &a.mode {
        for &ranks in &a.sweep.0 {
            for i in 0..a.repeat {
                let seed = a.run.seed.wrapping_add(i);
                let cfg = run_config(&a.run, mode, ranks, seed);
                let r = match run_coloring(&cfg) {
                    Ok(out) => out.record,
                    Err(e) => return fail(&e),
                };
                if !r.verification.proper {
                    eprintln!("improper coloring: {}", r.summary_line());
                    code = EXIT_IMPROPER;
                }
                let row = BenchRow {
                    mode,
                    ranks,
                    seed,
                    rounds: r.num_rounds,
                    colors: r.colors,
                    recolored_total: r.recolored_total,
                    bytes_sent: r.bytes_sent + r.setup_bytes,
                    comm_ms: round_ms(r.times.comm_ms),
                    comp_ms: round_ms(r.times.comp_ms()),
                    total_ms: round_ms(r.times.total_ms),
                };
                if let Err(e) = csv
                    .serialize(row)
                    .and_then(|()| csv.flush().map_err(Into::into))
                {
                    // A closed pipe (e.g. `| head`) just ends the sweep.
                    if let csv::ErrorKind::Io(io) = e.kind() {
                        if io.kind() == io::ErrorKind::BrokenPipe {
                            return code;
                        }
                    }
                    eprintln!("error: {e}");
                    return EXIT_USAGE;
                }
            }
        }
    }
    code
}

pub fn generate(a: GenArgs) -> u8 {
    let written = (|| {
        let g = a.generator.load(Mode::D1, a.seed)?.graph;
        let w = BufWriter::new(File::create(&a.out)?);
        match a.format {
            GraphFormat::Edges => write_edge_list(&g, w),
            GraphFormat::Csr => write_csr_cache(&g, w),
        }?;
        Ok::<_, Error>(g)
    })();
    match written {
        Ok(g) => {
            println!("vertices={} edges={}", g.num_vertices(), g.num_edges());
            EXIT_OK
        }
        Err(e) => fail(&e),
    }
}

pub fn stats(a: SourceArgs) -> u8 {
    match a.source().load(Mode::D1, 0) {
        Ok(inst) => {
            let s = graph_stats(&inst.graph);
            println!("{}", serde_json::to_string(&s).expect("stats serialize"));
            EXIT_OK
        }
        Err(e) => fail(&e),
    }
}
