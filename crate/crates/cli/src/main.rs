//! Command-line front end: build channels, print capacity reports, run
//! code searches, maximin-information checks, and estimation simulations.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num::rational::Ratio;

use fschan::{
    bounds_additive, c0f_erasure_dp, c0f_exact, check_conditions, confusability,
    max_zero_error_code, maximal_ratio, parse_family, report, run_estimation, to_json,
    topological_entropy, verify_capacity_oracle, ChannelKind, ChannelMachine, CoderConfig,
    DisturbancePolicy, NoisePolicy, PlantSpec, ReportOptions, SearchMode, SubsetSearch, Verdict,
};

#[derive(Parser)]
#[command(name = "fschan", version, about = "Finite-state channel analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ChannelArg {
    /// family spec like "sw-erasure:w=3,d=1,q=2" or a channel JSON file path
    #[arg(long)]
    channel: String,
}

impl ChannelArg {
    fn load(&self) -> Result<ChannelMachine> {
        if self.channel.contains(':') {
            return parse_family(&self.channel).map_err(|e| anyhow!(e));
        }
        let text = fs::read_to_string(&self.channel)
            .with_context(|| format!("cannot read channel file {}", self.channel))?;
        fschan::from_json(&text).map_err(|e| anyhow!(e))
    }
}

#[derive(Args)]
struct OutArg {
    /// write to this path instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Expand a family spec into a channel file
    Build {
        #[command(flatten)]
        channel: ChannelArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// Topological entropy of the channel
    Entropy {
        #[command(flatten)]
        channel: ChannelArg,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Maximal cycle ratio and a witness cycle
    Tau {
        #[command(flatten)]
        channel: ChannelArg,
    },
    /// Zero-error feedback capacity: exact value and the iterative check
    C0f {
        #[command(flatten)]
        channel: ChannelArg,
        /// iterations for the convergence demonstration
        #[arg(long, default_value_t = 3000)]
        k: usize,
    },
    /// Capacity report: tau, entropy, feedback capacity, bounds
    Bounds {
        #[command(flatten)]
        channel: ChannelArg,
        /// also search codes by brute force up to this blocklength
        #[arg(long)]
        bruteforce_n: Option<usize>,
    },
    /// Brute-force zero-error code search over blocklengths
    Codesearch {
        #[command(flatten)]
        channel: ChannelArg,
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value_t = fschan::codesearch::DEFAULT_WORD_CAP)]
        word_cap: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Maximin information of an input set at one blocklength
    Maximin {
        #[command(flatten)]
        channel: ChannelArg,
        /// blocklength; all q^n words form the input set unless --inputs
        #[arg(long)]
        n: usize,
        /// comma-separated input words, digits only, e.g. "000,011,101,110"
        #[arg(long)]
        inputs: Option<String>,
    },
    /// Cross-check maximin information against the exact code search
    Verify {
        #[command(flatten)]
        channel: ChannelArg,
        /// words have length n + 1
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Estimate an unstable scalar plant over the channel and emit a trace
    Simulate {
        #[command(flatten)]
        channel: ChannelArg,
        /// plant pole a = 2^exponent
        #[arg(long)]
        a_exponent: f64,
        #[arg(long, default_value_t = 100)]
        epochs: usize,
        #[arg(long, default_value_t = 15)]
        epoch_length: usize,
        /// code rate used by the coder; defaults to 1 - tau of the channel
        #[arg(long)]
        code_rate: Option<f64>,
        #[arg(long, value_enum, default_value_t = AdversaryArg::MaxErasure)]
        adversary: AdversaryArg,
        #[arg(long, value_enum, default_value_t = DisturbanceArg::Worst)]
        disturbance: DisturbanceArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AdversaryArg {
    MaxErasure,
    Zero,
    Alternating,
    Seeded,
}

#[derive(Clone, Copy, ValueEnum)]
enum DisturbanceArg {
    Worst,
    Zero,
    Alternating,
    Seeded,
}

fn ratio_str(r: Ratio<i64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn emit(out: &OutArg, text: &str) -> Result<()> {
    match &out.out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?
        }
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn bits(value: f64, q: u8) -> f64 {
    value * f64::from(q).log2()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Build { channel, out } => {
            let m = channel.load()?;
            emit(&out, &(to_json(&m) + "\n"))?;
        }
        Command::Entropy { channel, tol } => {
            let m = channel.load()?;
            let h = topological_entropy(&m, tol)?;
            let q = m.q();
            println!("h_ch = {h} (base {q}, Perron eigenvalue) = {} bits", bits(h, q));
        }
        Command::Tau { channel } => {
            let m = channel.load()?;
            let stats = maximal_ratio(&m);
            println!("tau = {} (maximal cycle ratio)", ratio_str(stats.tau));
            let cycle: Vec<String> = stats
                .witness_cycle
                .iter()
                .map(|e| {
                    format!("{}-[{}]->{}", m.state_name(e.from), e.noise, m.state_name(e.to))
                })
                .collect();
            println!("witness = {}", cycle.join(" "));
        }
        Command::C0f { channel, k } => {
            let m = channel.load()?;
            match m.kind() {
                ChannelKind::Erasure => {
                    let exact = c0f_exact(&m)?;
                    let dp = c0f_erasure_dp(&m, k)?;
                    println!(
                        "c0f = {} = {} (exact: 1 - tau)",
                        ratio_str(exact),
                        *exact.numer() as f64 / *exact.denom() as f64
                    );
                    println!("c0f_dp = {dp} (iterative, k = {k})");
                }
                ChannelKind::AdditiveNoise => {
                    let (_, upper) = bounds_additive(&m)?;
                    println!("c0f = {upper} (exact: 1 - h_ch)");
                }
            }
        }
        Command::Bounds {
            channel,
            bruteforce_n,
        } => {
            let m = channel.load()?;
            let r = report(
                &m,
                ReportOptions {
                    bruteforce_n_max: bruteforce_n,
                },
            )?;
            let q = r.q;
            println!("tau = {} = {}", ratio_str(r.tau), *r.tau.numer() as f64 / *r.tau.denom() as f64);
            println!("h_ch = {} ({} bits)", r.h_ch, bits(r.h_ch, q));
            let fmt = |v: &fschan::ReportValue| -> String {
                match v.exact {
                    Some(e) => format!("{} = {} ({} bits) [{}]", ratio_str(e), v.value, bits(v.value, q), v.method),
                    None => format!("{} ({} bits) [{}]", v.value, bits(v.value, q), v.method),
                }
            };
            println!("c0f = {}", fmt(&r.c0f));
            println!("c0_lower = {}", fmt(&r.c0_lower));
            println!("c0_upper = {}", fmt(&r.c0_upper));
            if let Some(brute) = &r.bruteforce_rate {
                println!("bruteforce_rate = {}", fmt(brute));
            }
        }
        Command::Codesearch {
            channel,
            n_max,
            word_cap,
            out,
        } => {
            let m = channel.load()?;
            let rows = fschan::codesearch::rate_scan_capped(
                &m,
                n_max,
                word_cap,
                fschan::codesearch::DEFAULT_PAIR_CAP,
            )?;
            let mut text = String::from("n,size,rate,exact\n");
            for row in &rows {
                text += &format!("{},{},{},{}\n", row.n, row.size, row.rate, row.exact);
            }
            // append the best codebook found at the largest improving n
            if let Some(best) = rows
                .iter()
                .max_by(|a, b| a.rate.partial_cmp(&b.rate).unwrap().then(b.n.cmp(&a.n)))
            {
                let graph = confusability(&m, best.n)?;
                let mode = if graph.num_words() <= fschan::codesearch::EXACT_WORD_LIMIT {
                    SearchMode::Exact
                } else {
                    SearchMode::Greedy
                };
                let code = max_zero_error_code(&graph, mode)?;
                text += "codebook\n";
                for word in &code.words {
                    let s: String = word.iter().map(|&d| char::from(b'0' + d)).collect();
                    text += &s;
                    text.push('\n');
                }
            }
            emit(&out, &text)?;
        }
        Command::Maximin { channel, n, inputs } => {
            let m = channel.load()?;
            let input_set: Vec<Vec<u8>> = match inputs {
                Some(list) => list
                    .split(',')
                    .map(|w| {
                        w.trim()
                            .chars()
                            .map(|c| {
                                c.to_digit(10)
                                    .map(|d| d as u8)
                                    .ok_or_else(|| anyhow!("bad input word {w:?}"))
                            })
                            .collect::<Result<Vec<u8>>>()
                    })
                    .collect::<Result<Vec<_>>>()?,
                None => {
                    let q = usize::from(m.q());
                    let count = q.pow(n as u32);
                    (0..count)
                        .map(|i| {
                            let mut idx = i;
                            let mut word = vec![0u8; n];
                            for slot in word.iter_mut().rev() {
                                *slot = (idx % q) as u8;
                                idx /= q;
                            }
                            word
                        })
                        .collect()
                }
            };
            let jr = fschan::joint_range(&m, &input_set)?;
            let partition = fschan::overlap_partition(&jr);
            println!("inputs = {}", input_set.len());
            println!("blocks = {}", partition.blocks.len());
            println!("maximin_info = {} symbols", fschan::maximin_info(&jr));
        }
        Command::Verify {
            channel,
            n,
            samples,
            seed,
        } => {
            let m = channel.load()?;
            let r = verify_capacity_oracle(&m, n, samples, seed)?;
            println!("blocklength = {}", r.blocklength);
            println!("max_code_size = {}", r.max_code_size);
            println!("code_info = {} symbols", r.code_info);
            match r.search {
                SubsetSearch::Full { subsets, max_info } => {
                    println!("subset_search = full over {subsets} subsets, max_info = {max_info}");
                }
                SubsetSearch::Sampled { samples, max_info } => {
                    println!("subset_search = {samples} random samples, max_info = {max_info}");
                }
            }
            println!("consistent = {}", r.consistent);
            if !r.consistent {
                return Err(anyhow!("maximin information disagrees with the code search"));
            }
        }
        Command::Simulate {
            channel,
            a_exponent,
            epochs,
            epoch_length,
            code_rate,
            adversary,
            disturbance,
            seed,
            out,
        } => {
            let m = channel.load()?;
            let plant = PlantSpec::new(2f64.powf(a_exponent));
            let rate = match code_rate {
                Some(r) => r,
                None => {
                    let tau = maximal_ratio(&m).tau;
                    1.0 - *tau.numer() as f64 / *tau.denom() as f64
                }
            };
            let coder = CoderConfig::new(epoch_length, rate, &plant);
            let noise = match adversary {
                AdversaryArg::MaxErasure => NoisePolicy::MaxErasure,
                AdversaryArg::Zero => NoisePolicy::Zero,
                AdversaryArg::Alternating => NoisePolicy::Alternating,
                AdversaryArg::Seeded => NoisePolicy::Seeded(seed),
            };
            let dist = match disturbance {
                DisturbanceArg::Worst => DisturbancePolicy::Worst,
                DisturbanceArg::Zero => DisturbancePolicy::Zero,
                DisturbanceArg::Alternating => DisturbancePolicy::Alternating,
                DisturbanceArg::Seeded => DisturbancePolicy::Seeded(seed),
            };
            let trace = run_estimation(&plant, &m, &coder, noise, dist, epochs)?;
            let mut text = String::from("epoch,t,x,xhat,error,delta,erasures,saturated\n");
            for r in &trace.records {
                text += &format!(
                    "{},{},{},{},{},{},{},{}\n",
                    r.epoch, r.t, r.x, r.xhat, r.error, r.delta, r.erasures, r.saturated
                );
            }
            emit(&out, &text)?;
            // verdicts from the capacity report, on stderr so the CSV stays clean
            let cap = report(&m, ReportOptions::default())?;
            let verdict = check_conditions(&plant, &cap);
            let name = |v: Verdict| match v {
                Verdict::Sufficient => "sufficient",
                Verdict::NecessityViolated => "necessity-violated",
                Verdict::Indeterminate => "indeterminate",
            };
            eprintln!(
                "h_lin = {}, rate condition: {}, structural condition: {}",
                verdict.h_lin,
                name(verdict.rate),
                name(verdict.structural)
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
