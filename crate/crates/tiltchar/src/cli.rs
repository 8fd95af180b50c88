//! Command-line front end: datum selection, table generation and caching,
//! queries, diagram rendering, and the verification sweep.

use crate::affine_weyl::{parse_word, weight_of, AffineWeylError, AlcoveElement, RootDatum};
use crate::balance::{balance_from_alcove, balance_run, BalanceError, BalanceState, ParityBlock};
use crate::characters::{
    delta_filtration_order, parity_layer, partial_character, tilting_layers, tilting_poly,
    weyl_simple_mults, CharError, CharTables, GradedCharacter,
};
use crate::hecke::{dualize, Parity};
use crate::kl::{KLTable, KlDump, KlError};
use crate::laurent::LaurentPoly;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or input files; exit code 2.
    Config(String),
    /// A query outside the computed table range; exit code 3.
    Range(String),
    /// A verification failure or unbalanced result; exit code 4.
    Verification(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Range(_) => 3,
            CliError::Verification(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Range(m) | CliError::Verification(m) => m,
        }
    }
}

impl From<AffineWeylError> for CliError {
    fn from(e: AffineWeylError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<KlError> for CliError {
    fn from(e: KlError) -> Self {
        match e {
            KlError::OutOfRange(..) | KlError::NotUpward { .. } => CliError::Range(e.to_string()),
            KlError::Weyl(w) => w.into(),
        }
    }
}

impl From<CharError> for CliError {
    fn from(e: CharError) -> Self {
        match e {
            CharError::Kl(k) => k.into(),
            CharError::KOutOfRange { .. } => CliError::Range(e.to_string()),
        }
    }
}

impl From<BalanceError> for CliError {
    fn from(e: BalanceError) -> Self {
        match e {
            BalanceError::Char(c) => c.into(),
            other => CliError::Verification(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Ascii,
    Latex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ParityArg {
    Sph,
    Asph,
}

impl From<ParityArg> for Parity {
    fn from(p: ParityArg) -> Parity {
        match p {
            ParityArg::Sph => Parity::Spherical,
            ParityArg::Asph => Parity::Antispherical,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "tiltchar",
    about = "Kazhdan-Lusztig combinatorics and balanced tilting characters for affine Weyl groups",
    version
)]
pub struct Cli {
    /// Built-in root system type (A1, A2, A3, B2, G2).
    #[arg(long = "type", global = true)]
    pub datum_type: Option<String>,
    /// Plain-text Cartan matrix file: one row of integers per line.
    #[arg(long, global = true, conflicts_with = "datum_type")]
    pub cartan: Option<PathBuf>,
    /// Length bound for table generation.
    #[arg(long, global = true, default_value_t = 6)]
    pub max_len: u32,
    /// Weight scale l for weight labels (requires l >= Coxeter number).
    #[arg(long, global = true)]
    pub l: Option<i64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Dump the canonical, tilde, and inverse polynomial tables.
    Kl {
        #[arg(long, value_enum, default_value_t = ParityArg::Asph)]
        parity: ParityArg,
    },
    /// The tilting polynomials t_{B,A} for a fixed A.
    Tilt {
        #[arg(long)]
        alcove: String,
    },
    /// Lusztig multiplicities of the Weyl module, or one parity layer.
    Weyl {
        #[arg(long)]
        alcove: String,
        /// Show parity_layer(A, i) instead of the v=1 multiplicities.
        #[arg(long)]
        layer: Option<u32>,
    },
    /// The graded (Loewy) layers of the tilting character T(A).
    Layers {
        #[arg(long)]
        alcove: String,
    },
    /// Partial-character sums along the Δ-filtration of T(A).
    Partial {
        #[arg(long)]
        alcove: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        i: i64,
    },
    /// Run the balancing algorithm on an alcove or a blocks file.
    Balance {
        #[arg(long)]
        alcove: Option<String>,
        /// JSON file: {"blocks": {label: [[labels...], ...]}, "order": [...], "top": label}.
        #[arg(long, conflicts_with = "alcove")]
        blocks: Option<PathBuf>,
        /// Annotate the LaTeX diagram with the traced block outlines.
        #[arg(long)]
        outline_blocks: bool,
    },
    /// Run the full invariant sweep up to max_len.
    Verify,
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(output) => {
            print!("{output}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

struct Job {
    datum: Arc<RootDatum>,
    /// Set only for --type datums; gates the table cache.
    builtin: Option<String>,
    max_len: u32,
    l: Option<i64>,
    format: Format,
}

impl Job {
    fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let (datum, builtin) = match (&cli.datum_type, &cli.cartan) {
            (Some(name), None) => (RootDatum::builtin(name)?, Some(name.to_ascii_uppercase())),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::Config(format!("cannot read {}: {e}", path.display()))
                })?;
                (RootDatum::from_config_text(&text)?, None)
            }
            (None, None) => {
                return Err(CliError::Config(
                    "a root datum is required: pass --type NAME or --cartan FILE".into(),
                ))
            }
            (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
        };
        if let Some(l) = cli.l {
            if l < datum.coxeter_number() {
                return Err(CliError::Config(format!(
                    "l = {l} is below the Coxeter number {}",
                    datum.coxeter_number()
                )));
            }
        }
        Ok(Job {
            datum: Arc::new(datum),
            builtin,
            max_len: cli.max_len,
            l: cli.l,
            format: cli.format,
        })
    }

    fn table(&self, parity: Parity) -> KLTable {
        if let (Some(label), Ok(dir)) = (&self.builtin, std::env::var("TILTCHAR_CACHE_DIR")) {
            let path =
                PathBuf::from(dir).join(format!("{label}-{parity}-{}.json", self.max_len));
            if let Ok(text) = std::fs::read_to_string(&path) {
                if let Ok(dump) = serde_json::from_str::<KlDump>(&text) {
                    if let Ok(table) =
                        KLTable::from_dump(self.datum.clone(), parity, self.max_len, &dump)
                    {
                        return table;
                    }
                }
            }
            let table = KLTable::new(self.datum.clone(), parity, self.max_len);
            if let Ok(json) = serde_json::to_string(&table.to_dump()) {
                let _ = std::fs::create_dir_all(path.parent().expect("cache path has parent"));
                let _ = std::fs::write(&path, json);
            }
            return table;
        }
        KLTable::new(self.datum.clone(), parity, self.max_len)
    }

    fn tables(&self) -> CharTables {
        CharTables::from_parts(
            self.table(Parity::Spherical),
            self.table(Parity::Antispherical),
        )
    }

    fn alcove(&self, word: &str) -> Result<AlcoveElement, CliError> {
        let x = parse_word(&self.datum, word)?;
        if x.length() > self.max_len {
            return Err(CliError::Range(format!(
                "alcove '{x}' has length {} beyond --max-len {}",
                x.length(),
                self.max_len
            )));
        }
        Ok(x)
    }

    fn weight_json(&self, x: &AlcoveElement) -> Result<Option<serde_json::Value>, CliError> {
        match self.l {
            Some(l) => Ok(Some(serde_json::json!(weight_of(&self.datum, x, l)?))),
            None => Ok(None),
        }
    }
}

pub fn run(cli: &Cli) -> Result<String, CliError> {
    // A blocks-file balance run needs no root datum at all.
    if let Command::Balance {
        alcove: None,
        blocks: Some(path),
        outline_blocks,
    } = &cli.command
    {
        return cmd_balance_blocks(path, *outline_blocks, cli.format);
    }
    let job = Job::from_cli(cli)?;
    match &cli.command {
        Command::Kl { parity } => cmd_kl(&job, (*parity).into()),
        Command::Tilt { alcove } => cmd_tilt(&job, alcove),
        Command::Weyl { alcove, layer } => cmd_weyl(&job, alcove, *layer),
        Command::Layers { alcove } => cmd_layers(&job, alcove),
        Command::Partial { alcove, k, i } => cmd_partial(&job, alcove, *k, *i),
        Command::Balance {
            alcove,
            blocks: _,
            outline_blocks,
        } => match alcove {
            Some(word) => cmd_balance_alcove(&job, word, *outline_blocks),
            None => Err(CliError::Config(
                "balance needs --alcove WORD or --blocks FILE".into(),
            )),
        },
        Command::Verify => cmd_verify(&job),
    }
}

fn poly_latex(p: &LaurentPoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (exp, coeff) in p.to_pairs() {
        let mut mag = coeff.magnitude().to_string();
        let sign = if coeff < 0.into() { "-" } else { "+" };
        if !out.is_empty() || sign == "-" {
            out.push_str(sign);
        }
        let var = match exp {
            0 => String::new(),
            1 => "v".into(),
            e => format!("v^{{{e}}}"),
        };
        if mag == "1" && !var.is_empty() {
            mag.clear();
        }
        out.push_str(&mag);
        out.push_str(&var);
    }
    out
}

fn table_rows(table: &KLTable, which: &str) -> Result<Vec<(String, String, LaurentPoly)>, CliError> {
    let mut rows = Vec::new();
    for x in table.elements() {
        match which {
            "canonical" => {
                for (y, p) in table.kl_basis(x)?.iter() {
                    rows.push((x.word_string(), y.word_string(), p.clone()));
                }
            }
            "tilde" => {
                for (y, p) in table.tilde_basis(x)?.iter() {
                    rows.push((x.word_string(), y.word_string(), p.clone()));
                }
            }
            _ => {
                for (y, p) in table.inverse_column(x)? {
                    rows.push((y.word_string(), x.word_string(), p.clone()));
                }
            }
        }
    }
    Ok(rows)
}

fn cmd_kl(job: &Job, parity: Parity) -> Result<String, CliError> {
    let table = job.table(parity);
    let sections = ["canonical", "tilde", "inverse"];
    match job.format {
        Format::Json => {
            let mut obj = serde_json::json!({
                "type": job.datum.label(),
                "parity": parity.to_string(),
                "max_len": job.max_len,
            });
            for which in sections {
                let rows: Vec<serde_json::Value> = table_rows(&table, which)?
                    .into_iter()
                    .map(|(x, y, p)| serde_json::json!({"x": x, "y": y, "poly": p}))
                    .collect();
                let key = if which == "canonical" { "entries" } else { which };
                obj[key] = serde_json::json!(rows);
            }
            Ok(format!("{}\n", serde_json::to_string_pretty(&obj).unwrap()))
        }
        Format::Ascii => {
            let mut out = format!(
                "# {} {} max_len={}\n",
                job.datum.label(),
                parity,
                job.max_len
            );
            for which in sections {
                out.push_str(&format!("[{which}]\n"));
                for (x, y, p) in table_rows(&table, which)? {
                    out.push_str(&format!("x={x} y={y} {p}\n"));
                }
            }
            Ok(out)
        }
        Format::Latex => {
            let mut out = String::from("\\begin{array}{lll}\n");
            for which in sections {
                out.push_str(&format!(
                    "\\multicolumn{{3}}{{l}}{{\\text{{{which}}}}}\\\\\n"
                ));
                for (x, y, p) in table_rows(&table, which)? {
                    out.push_str(&format!(
                        "\\mathtt{{{x}}} & \\mathtt{{{y}}} & {}\\\\\n",
                        poly_latex(&p)
                    ));
                }
            }
            out.push_str("\\end{array}\n");
            Ok(out)
        }
    }
}

fn cmd_tilt(job: &Job, alcove: &str) -> Result<String, CliError> {
    let a = job.alcove(alcove)?;
    let tables = job.tables();
    let mut rows: Vec<(AlcoveElement, LaurentPoly)> = Vec::new();
    for b in tables.asph.elements() {
        let t = tilting_poly(&tables, b, &a)?;
        if !t.is_zero() {
            rows.push((b.clone(), t));
        }
    }
    match job.format {
        Format::Json => {
            let mut polys = Vec::new();
            for (b, t) in &rows {
                let mut row = serde_json::json!({"word": b.word_string(), "poly": t});
                if let Some(w) = job.weight_json(b)? {
                    row["weight"] = w;
                }
                polys.push(row);
            }
            let obj = serde_json::json!({"alcove": a.word_string(), "polys": polys});
            Ok(format!("{}\n", serde_json::to_string_pretty(&obj).unwrap()))
        }
        Format::Ascii => {
            let mut out = String::new();
            for (b, t) in &rows {
                out.push_str(&format!("t({b}, {a}) = {t}\n"));
            }
            Ok(out)
        }
        Format::Latex => {
            let mut out = String::from("\\begin{align*}\n");
            for (b, t) in &rows {
                out.push_str(&format!(
                    "t_{{\\mathtt{{{}}},\\mathtt{{{}}}}} &= {}\\\\\n",
                    b.word_string(),
                    a.word_string(),
                    poly_latex(t)
                ));
            }
            out.push_str("\\end{align*}\n");
            Ok(out)
        }
    }
}

fn render_mults(
    job: &Job,
    header: serde_json::Value,
    mults: &BTreeMap<AlcoveElement, u64>,
) -> Result<String, CliError> {
    match job.format {
        Format::Json => {
            let mut factors = Vec::new();
            for (b, m) in mults {
                let mut row = serde_json::json!({"word": b.word_string(), "mult": m});
                if let Some(w) = job.weight_json(b)? {
                    row["weight"] = w;
                }
                factors.push(row);
            }
            let mut obj = header;
            obj["factors"] = serde_json::json!(factors);
            Ok(format!("{}\n", serde_json::to_string_pretty(&obj).unwrap()))
        }
        Format::Ascii => {
            let mut out = String::new();
            for (b, m) in mults {
                out.push_str(&format!("{b}: {m}\n"));
            }
            Ok(out)
        }
        Format::Latex => {
            let terms: Vec<String> = mults
                .iter()
                .map(|(b, m)| {
                    let coeff = if *m == 1 { String::new() } else { format!("{m}\\,") };
                    format!("{coeff}[\\mathtt{{{}}}]", b.word_string())
                })
                .collect();
            Ok(format!("{}\n", terms.join(" + ")))
        }
    }
}

fn cmd_weyl(job: &Job, alcove: &str, layer: Option<u32>) -> Result<String, CliError> {
    let a = job.alcove(alcove)?;
    let tables = job.tables();
    let (header, mults) = match layer {
        None => (
            serde_json::json!({"alcove": a.word_string()}),
            weyl_simple_mults(&tables, &a)?,
        ),
        Some(i) => (
            serde_json::json!({"alcove": a.word_string(), "layer": i}),
            parity_layer(&tables, &a, i)?,
        ),
    };
    render_mults(job, header, &mults)
}

/// One row per offset, most negative offset first, sorted labels repeated
/// by multiplicity.
fn diagram_rows(layers: &[(i64, BTreeMap<String, u64>)]) -> Vec<(i64, Vec<String>)> {
    let mut rows = Vec::new();
    for (offset, row) in layers {
        let mut labels: Vec<String> = Vec::new();
        for (label, mult) in row {
            for _ in 0..*mult {
                labels.push(label.clone());
            }
        }
        labels.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
        rows.push((*offset, labels));
    }
    rows.sort_by_key(|(offset, _)| *offset);
    rows
}

fn character_layers(c: &GradedCharacter) -> Vec<(i64, BTreeMap<String, u64>)> {
    c.offsets()
        .into_iter()
        .map(|i| {
            (
                i,
                c.layer(i)
                    .into_iter()
                    .map(|(b, m)| (b.word_string(), m))
                    .collect(),
            )
        })
        .collect()
}

fn state_layers(s: &BalanceState) -> Vec<(i64, BTreeMap<String, u64>)> {
    s.offsets().map(|i| (i, s.layer(i))).collect()
}

fn render_diagram(
    format: Format,
    layers: &[(i64, BTreeMap<String, u64>)],
    outline: Option<&[(String, i64)]>,
) -> String {
    let rows = diagram_rows(layers);
    match format {
        Format::Ascii => {
            let mut out = String::new();
            for (offset, labels) in rows {
                out.push_str(&format!("{offset:>3}: {}\n", labels.join(" ")));
            }
            out
        }
        Format::Latex => {
            let mut out = String::from("\\begin{matrix}\n");
            for (_, labels) in rows {
                let cells: Vec<String> =
                    labels.iter().map(|l| format!("\\mathtt{{{l}}}")).collect();
                out.push_str(&format!("{}\\\\\n", cells.join(" & ")));
            }
            out.push_str("\\end{matrix}\n");
            if let Some(trace) = outline {
                let parts: Vec<String> = trace
                    .iter()
                    .map(|(label, offset)| format!("{label}@{offset}"))
                    .collect();
                out.push_str(&format!("% outlined blocks: {}\n", parts.join(" ")));
            }
            out
        }
        Format::Json => unreachable!("json handled by callers"),
    }
}

fn cmd_layers(job: &Job, alcove: &str) -> Result<String, CliError> {
    let a = job.alcove(alcove)?;
    let tables = job.tables();
    let layers = tilting_layers(&tables, &a)?;
    match job.format {
        Format::Json => {
            let mut obj = layers.to_json(&a.word_string());
            if let Some(l) = job.l {
                for entry in obj["layers"].as_array_mut().unwrap() {
                    for factor in entry["factors"].as_array_mut().unwrap() {
                        let word = factor["word"].as_str().unwrap().to_string();
                        let x = parse_word(&job.datum, &word)?;
                        factor["weight"] = serde_json::json!(weight_of(&job.datum, &x, l)?);
                    }
                }
            }
            Ok(format!("{}\n", serde_json::to_string_pretty(&obj).unwrap()))
        }
        format => Ok(render_diagram(format, &character_layers(&layers), None)),
    }
}

fn cmd_partial(job: &Job, alcove: &str, k: usize, i: i64) -> Result<String, CliError> {
    let a = job.alcove(alcove)?;
    let tables = job.tables();
    let order = delta_filtration_order(&tables, &a)?;
    let partial = partial_character(&tables, &a, k, i)?;
    match job.format {
        Format::Json => {
            let factors: Vec<serde_json::Value> = partial
                .iter()
                .map(|(b, m)| serde_json::json!({"word": b.word_string(), "mult": m}))
                .collect();
            let obj = serde_json::json!({
                "alcove": a.word_string(),
                "k": k,
                "i": i,
                "order": order.iter().map(|x| x.word_string()).collect::<Vec<_>>(),
                "factors": factors,
            });
            Ok(format!("{}\n", serde_json::to_string_pretty(&obj).unwrap()))
        }
        Format::Ascii => {
            let mut out = format!(
                "order: {}\n",
                order
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            );
            for (b, m) in &partial {
                out.push_str(&format!("{b}: {m}\n"));
            }
            Ok(out)
        }
        Format::Latex => {
            let terms: Vec<String> = partial
                .iter()
                .map(|(b, m)| {
                    let coeff = if *m == 1 { String::new() } else { format!("{m}\\,") };
                    format!("{coeff}[L(\\mathtt{{{}}})]", b.word_string())
                })
                .collect();
            Ok(format!("{}\n", terms.join(" + ")))
        }
    }
}

fn balance_output(
    format: Format,
    state: &BalanceState,
    equal: Option<bool>,
    outline: bool,
) -> String {
    if format == Format::Json {
        let mut obj = state.to_json();
        if let Some(eq) = equal {
            obj["equal"] = serde_json::json!(eq);
        }
        return format!("{}\n", serde_json::to_string_pretty(&obj).unwrap());
    }
    let mut out = String::from("trace:");
    for (label, offset) in state.trace() {
        out.push_str(&format!(" ({label}, {offset})"));
    }
    out.push('\n');
    out.push_str(&render_diagram(
        format,
        &state_layers(state),
        if outline { Some(state.trace()) } else { None },
    ));
    if let Some(eq) = equal {
        out.push_str(&format!("matches t: {eq}\n"));
    }
    out
}

fn cmd_balance_alcove(job: &Job, alcove: &str, outline: bool) -> Result<String, CliError> {
    let a = job.alcove(alcove)?;
    let tables = job.tables();
    let (state, _, equal) = balance_from_alcove(&tables, &a)?;
    let out = balance_output(job.format, &state, Some(equal), outline);
    if !equal {
        // Print the counterexample before signalling failure.
        print!("{out}");
        return Err(CliError::Verification(format!(
            "balanced layers for '{a}' do not match the t-polynomials"
        )));
    }
    Ok(out)
}

#[derive(Deserialize)]
struct BlocksFile {
    blocks: BTreeMap<String, Vec<Vec<String>>>,
    order: Vec<String>,
    top: String,
}

fn cmd_balance_blocks(
    path: &PathBuf,
    outline: bool,
    format: Format,
) -> Result<String, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let file: BlocksFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("bad blocks file {}: {e}", path.display())))?;
    let blocks: BTreeMap<String, ParityBlock> = file
        .blocks
        .into_iter()
        .map(|(label, layers)| (label.clone(), ParityBlock::new(label, layers)))
        .collect();
    let state = balance_run(&blocks, &file.order, &file.top, 1 << 24)?;
    Ok(balance_output(format, &state, None, outline))
}

struct Sweep {
    lines: Vec<String>,
    failed: bool,
}

impl Sweep {
    fn report(&mut self, name: &str, checks: u64, first_failure: Option<String>) {
        match first_failure {
            None => self.lines.push(format!("{name}: pass ({checks} checks)")),
            Some(witness) => {
                self.failed = true;
                self.lines.push(format!("{name}: FAIL ({witness})"));
            }
        }
    }
}

fn cmd_verify(job: &Job) -> Result<String, CliError> {
    let tables = job.tables();
    let elements = tables.asph.elements().to_vec();
    let mut sweep = Sweep {
        lines: Vec::new(),
        failed: false,
    };

    // Self-duality of every tilting polynomial.
    let mut checks = 0;
    let mut failure = None;
    't_dual: for a in &elements {
        for b in &elements {
            let t = tilting_poly(&tables, b, a)?;
            checks += 1;
            if !t.is_self_dual() {
                failure = Some(format!("t({b}, {a}) = {t}"));
                break 't_dual;
            }
        }
    }
    sweep.report("t-self-dual", checks, failure);

    // Deodhar: tilde polynomials are signed bars of the opposite parity.
    let mut checks = 0;
    let mut failure = None;
    'deodhar: for x in &elements {
        for y in &elements {
            let sign = num_bigint::BigInt::from(if (x.length() + y.length()) % 2 == 0 {
                1
            } else {
                -1
            });
            for (tilde, canon, name) in [
                (&tables.sph, &tables.asph, "m~ vs n"),
                (&tables.asph, &tables.sph, "n~ vs m"),
            ] {
                checks += 1;
                let lhs = tilde.tilde_poly(y, x)?;
                let rhs = canon.kl_poly(y, x)?.bar().scaled(&sign);
                if lhs != rhs {
                    failure = Some(format!("{name} at ({y}, {x}): {lhs} vs {rhs}"));
                    break 'deodhar;
                }
            }
        }
    }
    sweep.report("deodhar-tilde", checks, failure);

    // Signed orthogonality of inverse against canonical polynomials.
    let mut checks = 0;
    let mut failure = None;
    'orth: for table in [&tables.sph, &tables.asph] {
        for x in &elements {
            for y in &elements {
                let mut acc = LaurentPoly::zero();
                for z in &elements {
                    let sign = if (z.length() + x.length()) % 2 == 0 { 1 } else { -1 };
                    let prod = &table.inverse_poly(z, x)? * &table.kl_poly(z, y)?;
                    acc += &prod.mul_term(0, &sign.into());
                }
                let expected = if x == y {
                    LaurentPoly::one()
                } else {
                    LaurentPoly::zero()
                };
                checks += 1;
                if acc != expected {
                    failure = Some(format!(
                        "{} residual at ({x}, {y}) = {acc}",
                        table.parity()
                    ));
                    break 'orth;
                }
            }
        }
    }
    sweep.report("orthogonality", checks, failure);

    // Canonical and tilde bases are fixed by the bar involution.
    let mut checks = 0;
    let mut failure = None;
    'dual: for table in [&tables.sph, &tables.asph] {
        for x in &elements {
            for basis in [table.kl_basis(x)?, table.tilde_basis(x)?] {
                checks += 1;
                let dual = dualize(&job.datum, basis)
                    .map_err(|e| CliError::Config(e.to_string()))?;
                if &dual != basis {
                    failure = Some(format!("{} basis at {x} not self-dual", table.parity()));
                    break 'dual;
                }
            }
        }
    }
    sweep.report("bar-invariance", checks, failure);

    // The balancing algorithm reproduces the t-polynomial layers.
    let mut checks = 0;
    let mut failure = None;
    for a in &elements {
        checks += 1;
        match balance_from_alcove(&tables, a) {
            Ok((_, _, true)) => {}
            Ok((state, _, false)) => {
                failure = Some(format!(
                    "A = {a}: layers differ, trace {:?}",
                    state.trace()
                ));
                break;
            }
            Err(e) => {
                failure = Some(format!("A = {a}: {e}"));
                break;
            }
        }
    }
    sweep.report("balance-vs-t", checks, failure);

    // Closed forms on the A1 chain.
    if job.datum.label() == "A1" {
        let mut checks = 0;
        let mut failure = None;
        'closed: for x in &elements {
            for y in &elements {
                let d = x.length().abs_diff(y.length()) as i64;
                let m = tables.sph.kl_poly(y, x)?;
                let expected_m = if y.length() <= x.length() {
                    LaurentPoly::monomial(d)
                } else {
                    LaurentPoly::zero()
                };
                let n = tables.asph.kl_poly(y, x)?;
                let expected_n = if x == y {
                    LaurentPoly::one()
                } else if y.length() + 1 == x.length() {
                    LaurentPoly::monomial(1)
                } else {
                    LaurentPoly::zero()
                };
                let inv = tables.sph.inverse_poly(y, x)?;
                let expected_inv = if x == y {
                    LaurentPoly::one()
                } else if y.length() == x.length() + 1 {
                    LaurentPoly::monomial(1)
                } else {
                    LaurentPoly::zero()
                };
                checks += 3;
                if m != expected_m || n != expected_n || inv != expected_inv {
                    failure = Some(format!("closed form mismatch at ({y}, {x})"));
                    break 'closed;
                }
            }
        }
        sweep.report("a1-closed-forms", checks, failure);
    }

    let mut out = sweep.lines.join("\n");
    out.push('\n');
    if sweep.failed {
        print!("{out}");
        return Err(CliError::Verification("invariant sweep failed".into()));
    }
    Ok(out)
}
