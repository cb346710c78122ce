//! `qcrypt`: hashing, batch evaluation, key generation and the image cipher.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tempfile::NamedTempFile;

use qcrypt_core::bits::BitString;
use qcrypt_core::cipher::{self, CipherText, SeedSpec, DEFAULT_MIX_GATES};
use qcrypt_core::codec::{self, BitImage};
use qcrypt_core::hash::{self, HashConfig, Mode, Template};
use qcrypt_core::metrics::{self, MetricsReport};
use qcrypt_core::sim::NoiseModel;

#[derive(Debug, Parser)]
#[command(name = "qcrypt", version, about = "Quantum-circuit hashing and nibble cipher toolkit")]
struct Cli {
    /// Seed for every random choice (sampling, key generation).
    #[arg(long, global = true, default_value_t = 0)]
    rng_seed: u64,
    /// Output path; stdout when omitted.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Hash one input and print the hash bits.
    Hash(HashArgs),
    /// Hash integer batches 0..B and report collision and uniformity metrics as CSV.
    Eval(EvalArgs),
    /// Generate a random seed file.
    Keygen(KeygenArgs),
    /// Encrypt a PBM image or a bitstring into a cipher JSON document.
    Encrypt(EncryptArgs),
    /// Decrypt a cipher JSON document into bits, or a PBM with --dims.
    Decrypt(DecryptArgs),
    /// Encrypt and decrypt the bundled 10x10 letter and report pixel mismatches.
    Demo,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Sampled,
}

#[derive(Debug, Args)]
struct HashArgs {
    /// `bits:0101`, `hex:ff`, or a path whose bytes are hashed.
    #[arg(long)]
    input: String,
    #[command(flatten)]
    circuit: CircuitArgs,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    #[arg(long, default_value_t = 1024)]
    shots: u64,
    /// Depolarizing and readout-flip probabilities, `p,q`.
    #[arg(long, value_parser = parse_noise)]
    noise: Option<(f64, f64)>,
}

/// Angles are in units of π: `--theta1 1.0` is π radians.
#[derive(Debug, Args)]
struct CircuitArgs {
    #[arg(long, default_value = "PQC3", value_parser = parse_template)]
    template: Template,
    #[arg(long, default_value_t = 4)]
    qubits: usize,
    /// Sets θ for both layers.
    #[arg(long)]
    theta: Option<f64>,
    /// Sets φ for both layers.
    #[arg(long)]
    phi: Option<f64>,
    #[arg(long)]
    theta1: Option<f64>,
    #[arg(long)]
    phi1: Option<f64>,
    #[arg(long)]
    theta2: Option<f64>,
    #[arg(long)]
    phi2: Option<f64>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    circuit: CircuitArgs,
    #[arg(long, value_delimiter = ',', default_value = "25,50,100")]
    batch_sizes: Vec<usize>,
    /// Bits per integer input; defaults to twice the qubit count.
    #[arg(long)]
    input_width: Option<usize>,
}

#[derive(Debug, Args)]
struct KeygenArgs {
    /// Number of random mix gates.
    #[arg(long, default_value_t = DEFAULT_MIX_GATES)]
    gates: usize,
}

#[derive(Debug, Args)]
struct EncryptArgs {
    /// A plain PBM path, or `bits:0101`.
    #[arg(long = "in")]
    input: String,
    /// Seed JSON file.
    #[arg(long)]
    seed: PathBuf,
    /// Also write the cipher bits as a PBM with the input image's dimensions.
    #[arg(long)]
    preview: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DecryptArgs {
    /// Cipher JSON file.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    seed: PathBuf,
    /// Image size `WxH`; writes a PBM instead of a bitstring.
    #[arg(long, value_parser = parse_dims)]
    dims: Option<(usize, usize)>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Validation(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Validation(_) => 3,
            Failure::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Validation(m) | Failure::Io(m) => m,
        }
    }
}

fn invalid(e: impl ToString) -> Failure {
    Failure::Validation(e.to_string())
}

fn parse_template(s: &str) -> Result<Template, String> {
    s.parse().map_err(|e: hash::HashError| e.to_string())
}

fn parse_noise(s: &str) -> Result<(f64, f64), String> {
    let (p, q) = s.split_once(',').ok_or("expected `p,q`")?;
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    Ok((num(p)?, num(q)?))
}

fn parse_dims(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or("expected `WxH`")?;
    let num = |v: &str| v.parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
    Ok((num(w)?, num(h)?))
}

fn read_file(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    String::from_utf8(read_file(path)?).map_err(|_| invalid(format!("{}: not UTF-8", path.display())))
}

/// Writes via a sibling temp file and a rename so readers never see a partial file.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let io_err = |e: io::Error| Failure::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

fn emit(output: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match output {
        Some(p) => write_atomic(p, bytes),
        None => io::stdout().write_all(bytes).map_err(|e| Failure::Io(e.to_string())),
    }
}

fn parse_bits_input(spec: &str) -> Result<Option<BitString>, Failure> {
    if let Some(b) = spec.strip_prefix("bits:") {
        return b.parse().map(Some).map_err(invalid);
    }
    if let Some(h) = spec.strip_prefix("hex:") {
        return BitString::from_hex(h).map(Some).map_err(invalid);
    }
    Ok(None)
}

fn hash_config(args: &CircuitArgs) -> HashConfig {
    let pi = std::f64::consts::PI;
    let mut cfg = HashConfig::new(args.template).with_qubits(args.qubits);
    if let Some(t) = args.theta {
        cfg.theta1 = t * pi;
        cfg.theta2 = t * pi;
    }
    if let Some(p) = args.phi {
        cfg.phi1 = p * pi;
        cfg.phi2 = p * pi;
    }
    for (slot, value) in [
        (&mut cfg.theta1, args.theta1),
        (&mut cfg.phi1, args.phi1),
        (&mut cfg.theta2, args.theta2),
        (&mut cfg.phi2, args.phi2),
    ] {
        if let Some(v) = value {
            *slot = v * pi;
        }
    }
    cfg
}

fn cmd_hash(cli: &Cli, args: &HashArgs) -> Result<(), Failure> {
    let input = match parse_bits_input(&args.input)? {
        Some(bits) => bits,
        None => BitString::from_bytes(&read_file(Path::new(&args.input))?),
    };
    let mut cfg = hash_config(&args.circuit);
    match args.mode {
        ModeArg::Exact => {
            if args.noise.is_some() {
                return Err(Failure::Usage("--noise requires --mode sampled".into()));
            }
        }
        ModeArg::Sampled => {
            let (p, q) = args.noise.unwrap_or((0.0, 0.0));
            let noise = NoiseModel::new(p, q).map_err(invalid)?;
            cfg.mode = Mode::Sampled { shots: args.shots, rng_seed: cli.rng_seed, noise };
        }
    }
    let h = hash::hash(&input, &cfg).map_err(invalid)?;
    emit(cli.output.as_deref(), format!("{h}\n").as_bytes())
}

/// `report.csv` gets siblings `report_hist_<B>.csv`, one per batch size.
fn histogram_path(summary: &Path, size: usize) -> PathBuf {
    let stem = summary.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "eval".into());
    summary.with_file_name(format!("{stem}_hist_{size}.csv"))
}

fn cmd_eval(cli: &Cli, args: &EvalArgs) -> Result<(), Failure> {
    if args.batch_sizes.is_empty() {
        return Err(Failure::Usage("--batch-sizes needs at least one size".into()));
    }
    let cfg = hash_config(&args.circuit);
    cfg.validate().map_err(invalid)?;
    let width = args.input_width.unwrap_or_else(|| metrics::default_input_width(&cfg));
    let reports = metrics::batch_sweep(&cfg, &args.batch_sizes, width).map_err(invalid)?;
    if let Some(out) = cli.output.as_deref() {
        for (size, r) in &reports {
            write_atomic(&histogram_path(out, *size), codec::histogram_csv(&r.histogram).as_bytes())?;
        }
    }
    let summary = codec::summary_csv(reports.iter().map(|(_, r)| r as &MetricsReport));
    emit(cli.output.as_deref(), summary.as_bytes())
}

fn cmd_keygen(cli: &Cli, args: &KeygenArgs) -> Result<(), Failure> {
    let seed = cipher::keygen_with(cli.rng_seed, args.gates);
    cipher::validate_seed(&seed).map_err(|v| invalid(cipher::CipherError::InvalidSeed(v)))?;
    emit(cli.output.as_deref(), format!("{}\n", codec::seed_to_json(&seed)).as_bytes())
}

fn load_seed(path: &Path) -> Result<SeedSpec, Failure> {
    let seed = codec::seed_from_json(&read_text(path)?).map_err(invalid)?;
    cipher::validate_seed(&seed).map_err(|v| invalid(cipher::CipherError::InvalidSeed(v)))?;
    Ok(seed)
}

fn cmd_encrypt(cli: &Cli, args: &EncryptArgs) -> Result<(), Failure> {
    let seed = load_seed(&args.seed)?;
    let (bits, dims) = match parse_bits_input(&args.input)? {
        Some(bits) => (bits, None),
        None => {
            let img = codec::read_pbm(&read_file(Path::new(&args.input))?).map_err(invalid)?;
            (codec::image_to_bits(&img), Some((img.width(), img.height())))
        }
    };
    let ct = cipher::encrypt(&bits, &seed).map_err(invalid)?;
    if let Some(preview) = &args.preview {
        let (w, h) = dims.unwrap_or((ct.bits.len(), 1));
        let img = codec::preview_image(&ct.bits, w, h).map_err(invalid)?;
        write_atomic(preview, &codec::write_pbm(&img))?;
    }
    emit(cli.output.as_deref(), format!("{}\n", codec::cipher_to_json(&ct)).as_bytes())
}

fn cmd_decrypt(cli: &Cli, args: &DecryptArgs) -> Result<(), Failure> {
    let seed = load_seed(&args.seed)?;
    let ct: CipherText = codec::cipher_from_json(&read_text(&args.input)?).map_err(invalid)?;
    let bits = cipher::decrypt(&ct, &seed).map_err(invalid)?;
    let bytes = match args.dims {
        Some((w, h)) => codec::write_pbm(&codec::bits_to_image(&bits, w, h).map_err(invalid)?),
        None => format!("{bits}\n").into_bytes(),
    };
    emit(cli.output.as_deref(), &bytes)
}

/// With `--output DIR`, writes plain.pbm, cipher.pbm and decrypted.pbm there.
fn cmd_demo(cli: &Cli) -> Result<(), Failure> {
    let seed = cipher::keygen(cli.rng_seed);
    let plain = codec::letter_a();
    let ct = cipher::encrypt(&codec::image_to_bits(&plain), &seed).map_err(invalid)?;
    let cipher_img = codec::preview_image(&ct.bits, plain.width(), plain.height()).map_err(invalid)?;
    let decrypted: BitImage =
        codec::bits_to_image(&cipher::decrypt(&ct, &seed).map_err(invalid)?, plain.width(), plain.height())
            .map_err(invalid)?;
    if let Some(dir) = cli.output.as_deref() {
        fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
        for (name, img) in [("plain.pbm", &plain), ("cipher.pbm", &cipher_img), ("decrypted.pbm", &decrypted)] {
            write_atomic(&dir.join(name), &codec::write_pbm(img))?;
        }
    }
    println!("cipher vs plain mismatches: {}", cipher_img.mismatches(&plain));
    println!("decrypted vs plain mismatches: {}", decrypted.mismatches(&plain));
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Hash(a) => cmd_hash(cli, a),
        Command::Eval(a) => cmd_eval(cli, a),
        Command::Keygen(a) => cmd_keygen(cli, a),
        Command::Encrypt(a) => cmd_encrypt(cli, a),
        Command::Decrypt(a) => cmd_decrypt(cli, a),
        Command::Demo => cmd_demo(cli),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("qcrypt: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
