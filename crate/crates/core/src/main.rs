use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::RngCore;

use mlsd::codec::{self, CodecError};
use mlsd::estimator::{self, DualConvention, LweInstance};
use mlsd::kat;
use mlsd::{ParamSet, Reject, Scheme, Seed256, VerifyPolicy};

#[derive(Parser)]
#[command(name = "mlsd", version, about = "Module-LWE signature scheme tool")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PolicyArg {
    /// h bound to the secret key (signer) / decode(z2) (verifier)
    Literal,
    /// h derived from z2 on both sides
    Z2,
}

impl From<PolicyArg> for VerifyPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Literal => VerifyPolicy::LITERAL,
            PolicyArg::Z2 => VerifyPolicy::Z2,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ConventionArg {
    Reference,
    Textbook,
}

impl From<ConventionArg> for DualConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Reference => DualConvention::Reference,
            ConventionArg::Textbook => DualConvention::Textbook,
        }
    }
}

fn parse_seed(s: &str) -> Result<Seed256, String> {
    if s.len() != 64 || s.bytes().any(|b| b.is_ascii_uppercase()) {
        return Err("expected 64 lowercase hex characters".into());
    }
    Seed256::from_hex(s).map_err(|e| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key pair.
    Keygen {
        #[arg(long)]
        out_pk: PathBuf,
        #[arg(long)]
        out_sk: PathBuf,
        /// 32-byte key seed (hex); drawn from the OS when omitted.
        #[arg(long, value_parser = parse_seed)]
        seed: Option<Seed256>,
    },
    /// Sign a message file.
    Sign {
        #[arg(long)]
        sk: PathBuf,
        #[arg(long)]
        pk: PathBuf,
        #[arg(long)]
        msg: PathBuf,
        #[arg(long)]
        out_sig: PathBuf,
        #[arg(long, value_enum, default_value = "literal")]
        policy: PolicyArg,
        /// Fixed signing coin (hex), for known-answer testing only.
        #[arg(long, value_parser = parse_seed, requires = "kat")]
        r: Option<Seed256>,
        /// Allow a caller-supplied signing coin.
        #[arg(long)]
        kat: bool,
    },
    /// Verify a signature; exit 0 on accept, 1 on reject.
    Verify {
        #[arg(long)]
        pk: PathBuf,
        #[arg(long)]
        msg: PathBuf,
        #[arg(long)]
        sig: PathBuf,
        #[arg(long, value_enum, default_value = "literal")]
        policy: PolicyArg,
        /// Skip the h check and test only the message branch.
        #[arg(long)]
        no_h_check: bool,
    },
    /// Emit deterministic known-answer vectors.
    Kat {
        #[arg(long)]
        count: u32,
        #[arg(long, value_parser = parse_seed)]
        seed: Seed256,
        #[arg(long, value_enum, default_value = "literal")]
        policy: PolicyArg,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count verification-condition failures over honest signatures.
    Measure {
        #[arg(long)]
        trials: u64,
        #[arg(long, value_enum, default_value = "literal")]
        policy: PolicyArg,
        /// Master seed (hex); drawn from the OS when omitted.
        #[arg(long, value_parser = parse_seed)]
        seed: Option<Seed256>,
        #[arg(long)]
        json: bool,
    },
    /// Core-SVP estimate of the primal and dual attacks.
    Estimate {
        #[arg(long, default_value_t = 1024)]
        n_lwe: usize,
        #[arg(long, default_value_t = 12289)]
        q: u32,
        #[arg(long, default_value_t = 16)]
        eta: u32,
        /// Defaults to 2 * n-lwe.
        #[arg(long)]
        max_samples: Option<usize>,
        #[arg(long, value_enum, default_value = "reference")]
        convention: ConventionArg,
        #[arg(long)]
        json: bool,
    },
    /// Print the parameter set, derived constants and sizes.
    Info,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: CodecError },
    #[error("signature rejected: {0}")]
    Rejected(Reject),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Rejected(_) => 1,
            CliError::Usage(_) | CliError::Parse { .. } => 2,
            CliError::Io { .. } => 3,
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Write through a temporary file in the target directory, then rename.
fn write_atomic(path: &Path, data: &[u8]) -> Result<(), CliError> {
    let io_err = |source| CliError::Io {
        path: path.to_owned(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(data).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

fn os_seed() -> Seed256 {
    let mut b = [0u8; 32];
    rand::rngs::OsRng.fill_bytes(&mut b);
    Seed256(b)
}

fn parse_with<T>(
    path: &Path,
    f: impl FnOnce(&[u8]) -> Result<T, CodecError>,
) -> Result<T, CliError> {
    let bytes = read(path)?;
    f(&bytes).map_err(|source| CliError::Parse {
        path: path.to_owned(),
        source,
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    let scheme = Scheme::default();
    let params = *scheme.params();
    let ring = scheme.ring();
    let mut stdout = io::stdout().lock();
    let out_err = |source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    };

    match cli.command {
        Command::Keygen {
            out_pk,
            out_sk,
            seed,
        } => {
            let zeta = seed.unwrap_or_else(os_seed);
            let (pk, sk) = scheme.keygen(&zeta);
            write_atomic(&out_pk, &codec::serialize_pk(&pk, &params))?;
            write_atomic(&out_sk, &codec::serialize_sk(&sk, &params))?;
        }
        Command::Sign {
            sk,
            pk,
            msg,
            out_sig,
            policy,
            r,
            kat: _,
        } => {
            let sk = parse_with(&sk, |b| codec::parse_sk(b, ring))?;
            let pk = parse_with(&pk, |b| codec::parse_pk(b, ring))?;
            let msg = read(&msg)?;
            let coin = r.unwrap_or_else(os_seed);
            let sig = scheme.sign(&sk, &pk, &msg, &coin, policy.into());
            write_atomic(&out_sig, &codec::serialize_sig(&sig, &params))?;
        }
        Command::Verify {
            pk,
            msg,
            sig,
            policy,
            no_h_check,
        } => {
            let pk = parse_with(&pk, |b| codec::parse_pk(b, ring))?;
            let msg = read(&msg)?;
            let sig = parse_with(&sig, |b| codec::parse_sig(b, ring))?;
            let mut policy: VerifyPolicy = policy.into();
            policy.check_h = !no_h_check;
            scheme
                .verify(&pk, &msg, &sig, policy)
                .map_err(CliError::Rejected)?;
            writeln!(stdout, "accept").map_err(out_err)?;
        }
        Command::Kat {
            count,
            seed,
            policy,
            out,
        } => {
            let text = kat::kat_file(&scheme, &seed, count, policy.into());
            match out {
                Some(path) => write_atomic(&path, text.as_bytes())?,
                None => stdout.write_all(text.as_bytes()).map_err(out_err)?,
            }
        }
        Command::Measure {
            trials,
            policy,
            seed,
            json,
        } => {
            if trials == 0 {
                return Err(CliError::Usage("--trials must be at least 1".into()));
            }
            let master = seed.unwrap_or_else(os_seed);
            let rep = scheme
                .measure_agreement(trials, policy.into(), &master)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            if json {
                let v = serde_json::to_string_pretty(&rep).expect("serializable report");
                writeln!(stdout, "{v}").map_err(out_err)?;
            } else {
                writeln!(
                    stdout,
                    "trials={} master={}\nmu failures: {} rate {:.3e} [95% CI {:.3e}, {:.3e}]\nh failures:  {} rate {:.3e} [95% CI {:.3e}, {:.3e}]",
                    rep.trials,
                    master.to_hex(),
                    rep.mu_failures,
                    rep.mu_rate.rate,
                    rep.mu_rate.lower,
                    rep.mu_rate.upper,
                    rep.h_failures,
                    rep.h_rate.rate,
                    rep.h_rate.lower,
                    rep.h_rate.upper,
                )
                .map_err(out_err)?;
            }
        }
        Command::Estimate {
            n_lwe,
            q,
            eta,
            max_samples,
            convention,
            json,
        } => {
            let mut inst = LweInstance::with_binomial_noise(n_lwe, q, eta);
            if let Some(m) = max_samples {
                inst.max_samples = m;
            }
            let p = ParamSet { q, eta, ..params };
            let row = estimator::table_row(&p, &inst, convention.into())
                .map_err(|e| CliError::Usage(e.to_string()))?;
            if json {
                let v = serde_json::to_string_pretty(&row).expect("serializable row");
                writeln!(stdout, "{v}").map_err(out_err)?;
            } else {
                writeln!(stdout, "{row}").map_err(out_err)?;
            }
        }
        Command::Info => {
            let c = ring.ntt_constants();
            let s = estimator::key_sizes(&params).expect("k > 0");
            writeln!(
                stdout,
                "parameter set {} (id {:#04x})\n  n = {}, q = {}, k = {}, eta = {}, redundancy = {}\n  \
                 packing: {} bits/coefficient, {} bytes/polynomial\n  \
                 ntt: generator = {}, gamma = {}, omega = {}, n^-1 = {}\n  \
                 sizes (bytes): pk {:.1} / sk {:.1} / sig {:.1} (wire {} / {} / {})",
                params.name(),
                params.id().expect("registered"),
                params.n,
                params.q,
                params.k,
                params.eta,
                params.redundancy,
                params.bits_per_coeff(),
                params.packed_poly_bytes(),
                c.generator,
                c.gamma,
                c.omega,
                c.n_inv,
                s.pk_it,
                s.sk_it,
                s.sig_it,
                s.pk_wire,
                s.sk_wire,
                s.sig_wire,
            )
            .map_err(out_err)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mlsd: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
