//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! exits nonzero if any fail.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, TAU};
use std::fs;
use std::panic;
use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use cqubit::dsl::parse_bytes;
use cqubit::netlist::{build_hadamard_netlist, DividerDesign, STOCK_R1, STOCK_R2};
use cqubit::{
    apply_gate, apply_pipeline, channels_at, compile, divider_ratio, format, matrix_of, oracle_apply, parse, quad_of,
    Backend, ChannelQuad, ChannelQuadWave, ComplexValue, CqubitParams, GateOp, NetlistOptions, Program,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BIN: &str = env!("CARGO_BIN_EXE_cqubit");
const DEMO_OMEGA: f64 = TAU * 1e9;

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn cqubit_bin(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("cqubit binary runs")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

struct Csv {
    cols: Vec<Vec<String>>,
}

impl Csv {
    fn parse(text: &str) -> Result<Self, String> {
        let mut lines = text.lines();
        let header = lines.next().ok_or("empty csv")?;
        let mut cols = vec![Vec::new(); header.split(',').count()];
        for line in lines {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != cols.len() {
                return Err(format!("ragged row `{line}`"));
            }
            for (c, f) in cols.iter_mut().zip(fields) {
                c.push(f.to_string());
            }
        }
        Ok(Self { cols })
    }

    fn num(&self, col: usize) -> Vec<f64> {
        self.cols[col]
            .iter()
            .map(|v| v.parse().expect("numeric csv field"))
            .collect()
    }
}

fn run_demo(name: &str, dir: &Path) -> Result<(Csv, Duration), String> {
    let out = dir.join(format!("{name}.csv"));
    let start = Instant::now();
    let res = cqubit_bin(&["demo", name, "--out", out.to_str().unwrap()]);
    let elapsed = start.elapsed();
    ensure(res.status.success(), || {
        format!("demo {name} exited with {:?}", res.status.code())
    })?;
    let csv = Csv::parse(&fs::read_to_string(&out).map_err(|e| e.to_string())?)?;
    ensure(csv.cols[0].len() == 1000, || {
        format!("expected 1000 samples, got {}", csv.cols[0].len())
    })?;
    Ok((csv, elapsed))
}

fn max_err(got: &[f64], want: impl Fn(usize) -> f64) -> f64 {
    got.iter()
        .enumerate()
        .map(|(k, g)| (g - want(k)).abs())
        .fold(0.0, f64::max)
}

fn ac1(dir: &Path) -> Check {
    let (csv, elapsed) = run_demo("hadamard", dir)?;
    let t = csv.num(0);
    let e0 = max_err(&csv.num(5), |k| {
        FRAC_1_SQRT_2 * ((DEMO_OMEGA * t[k]).cos() + (DEMO_OMEGA * t[k]).sin())
    });
    let e1 = max_err(&csv.num(7), |k| {
        FRAC_1_SQRT_2 * ((DEMO_OMEGA * t[k]).cos() - (DEMO_OMEGA * t[k]).sin())
    });
    ensure((t[999] - 2e-9).abs() < 1e-24, || format!("grid ends at {}", t[999]))?;
    ensure(e0 < 1e-9 && e1 < 1e-9, || {
        format!("closed form error c0re {e0:e}, c1re {e1:e}")
    })?;
    let imag_zero = [6, 8].iter().all(|&c| csv.num(c).iter().all(|v| *v == 0.0));
    ensure(imag_zero, || "imaginary output channels not identically 0".into())?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "err c0re {e0:.1e}, c1re {e1:.1e}, imag = 0, {} ms",
        elapsed.as_millis()
    ))
}

fn ac2(dir: &Path) -> Check {
    let (csv, elapsed) = run_demo("rphi", dir)?;
    let t = csv.num(0);
    let s = |k: usize| (DEMO_OMEGA * t[k] + FRAC_PI_2).sin();
    let e_re = max_err(&csv.num(7), |k| -FRAC_1_SQRT_2 * s(k));
    let e_im = max_err(&csv.num(8), |k| FRAC_1_SQRT_2 * s(k));
    ensure(e_re < 1e-9 && e_im < 1e-9, || {
        format!("closed form error c1re {e_re:e}, c1im {e_im:e}")
    })?;
    for (i, o) in [(1, 5), (2, 6)] {
        let same = csv
            .num(i)
            .iter()
            .zip(csv.num(o))
            .all(|(a, b)| a.to_bits() == b.to_bits());
        ensure(same, || format!("column {o} differs from input column {i}"))?;
    }
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "err c1re {e_re:.1e}, c1im {e_im:.1e}, c0 bit-identical, {} ms",
        elapsed.as_millis()
    ))
}

fn ac3() -> Check {
    let res = cqubit_bin(&["design-divider", "--ratio", "0.7071067812", "--r1", "10e3"]);
    ensure(res.status.success(), || {
        format!("design-divider exited with {:?}", res.status.code())
    })?;
    let text = String::from_utf8_lossy(&res.stdout).into_owned();
    let r2: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("r2:"))
        .and_then(|v| v.trim().trim_end_matches("ohm").trim().parse().ok())
        .ok_or_else(|| format!("no r2 line in output:\n{text}"))?;
    ensure((r2 - 24140.0).abs() <= 10.0, || format!("r2 = {r2} ohm"))?;
    let ratio = divider_ratio(10e3, 24.14e3).map_err(|e| e.to_string())?;
    ensure((ratio - 0.70709).abs() <= 1e-5, || format!("ratio = {ratio}"))?;
    Ok(format!("r2 = {r2} ohm, ratio(10k, 24.14k) = {ratio:.10}"))
}

fn random_params(rng: &mut ChaCha8Rng) -> CqubitParams {
    CqubitParams::new(
        rng.random_range(1e6..1e10),
        rng.random_range(-10.0..10.0),
        rng.random_range(-10.0..10.0),
        rng.random_range(-10.0..10.0),
    )
    .unwrap()
}

/// Either a sample of a random cqubit or an arbitrary normalized pair.
fn random_quad(rng: &mut ChaCha8Rng) -> ChannelQuad {
    if rng.random_bool(0.5) {
        let p = random_params(rng);
        channels_at(&p, rng.random_range(0.0..1e-6))
    } else {
        let v: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-3);
        ChannelQuad::from_array(v.map(|x| x / n))
    }
}

fn random_gate(rng: &mut ChaCha8Rng) -> GateOp {
    match rng.random_range(0..3) {
        0 => GateOp::Hadamard,
        1 => GateOp::PauliX,
        _ => GateOp::rphi(rng.random_range(-10.0..10.0)),
    }
}

/// 2x2 matrices written out by hand, independent of the library.
fn reference_matrix(g: GateOp) -> [[ComplexValue; 2]; 2] {
    let c = |re: f64| ComplexValue::new(re, 0.0);
    match g {
        GateOp::Hadamard => [
            [c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)],
            [c(FRAC_1_SQRT_2), c(-FRAC_1_SQRT_2)],
        ],
        GateOp::PauliX => [[c(0.0), c(1.0)], [c(1.0), c(0.0)]],
        GateOp::RPhi(phi) => [[c(1.0), c(0.0)], [c(0.0), ComplexValue::from_polar(1.0, phi)]],
    }
}

fn reference_apply(g: GateOp, q: &ChannelQuad) -> [f64; 4] {
    let a = ComplexValue::new(q.c0_re, q.c0_im);
    let b = ComplexValue::new(q.c1_re, q.c1_im);
    let m = reference_matrix(g);
    let a2 = m[0][0] * a + m[0][1] * b;
    let b2 = m[1][0] * a + m[1][1] * b;
    [a2.re, a2.im, b2.re, b2.im]
}

fn diff(a: [f64; 4], b: [f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn ac4() -> Check {
    const CASES: usize = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut report = Vec::new();
    for (name, pick) in [("H", 0), ("X", 1), ("RPHI", 2)] {
        let mut worst: f64 = 0.0;
        for _ in 0..CASES {
            let q = random_quad(&mut rng);
            let g = match pick {
                0 => GateOp::Hadamard,
                1 => GateOp::PauliX,
                _ => GateOp::rphi(rng.random_range(-10.0..10.0)),
            };
            let got = apply_gate(&q, g).to_array();
            let (a, b) = oracle_apply(
                &matrix_of(g),
                ComplexValue::new(q.c0_re, q.c0_im),
                ComplexValue::new(q.c1_re, q.c1_im),
            )
            .map_err(|e| e.to_string())?;
            worst = worst
                .max(diff(got, quad_of(a, b).to_array()))
                .max(diff(got, reference_apply(g, &q)));
        }
        ensure(worst < 1e-12, || format!("{name}: worst component error {worst:e}"))?;
        report.push(format!("{name} {worst:.1e}"));
    }
    Ok(format!("{CASES} cases per gate, worst {}", report.join(", ")))
}

fn ac5() -> Check {
    const CASES: usize = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut hh, mut xx, mut rr, mut norm) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..CASES {
        let q = random_quad(&mut rng);
        hh = hh.max(apply_pipeline(&q, &[GateOp::Hadamard, GateOp::Hadamard]).max_abs_diff(&q));
        xx = xx.max(apply_pipeline(&q, &[GateOp::PauliX, GateOp::PauliX]).max_abs_diff(&q));
        let (a, b) = (rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
        let composed = apply_pipeline(&q, &[GateOp::rphi(a), GateOp::rphi(b)]);
        rr = rr.max(composed.max_abs_diff(&apply_gate(&q, GateOp::rphi(a + b))));
        let gates: Vec<GateOp> = (0..rng.random_range(1..=8)).map(|_| random_gate(&mut rng)).collect();
        norm = norm.max((apply_pipeline(&q, &gates).norm_sqr() - q.norm_sqr()).abs());
    }
    ensure(hh < 1e-12 && xx < 1e-12 && rr < 1e-12 && norm < 1e-12, || {
        format!("HH {hh:e}, XX {xx:e}, RaRb {rr:e}, norm {norm:e}")
    })?;
    Ok(format!(
        "{CASES} cases each: HH {hh:.1e}, XX {xx:.1e}, RaRb {rr:.1e}, norm {norm:.1e}"
    ))
}

fn random_program(rng: &mut ChaCha8Rng) -> Program {
    let gates = (0..rng.random_range(0..=8)).map(|_| random_gate(rng)).collect();
    Program::new(random_params(rng), gates)
}

fn ac6() -> Check {
    const PROGRAMS: usize = 2_000;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let exact = NetlistOptions::exact(10e3).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for _ in 0..PROGRAMS {
        let p = random_program(&mut rng);
        let wave =
            ChannelQuadWave::from_params(&p.init, 0.0, 1.0 / p.init.omega() / 16.0, 64).map_err(|e| e.to_string())?;
        let ideal = compile(&p, Backend::Ideal, &exact)
            .map_err(|e| e.to_string())?
            .run(&wave);
        let net = compile(&p, Backend::Netlist, &exact)
            .map_err(|e| e.to_string())?
            .run(&wave);
        worst = worst.max(ideal.max_abs_diff(&net));
    }
    ensure(worst < 1e-12, || format!("ideal vs exact netlist deviation {worst:e}"))?;

    // Rounded resistors: the H output on one unit input channel is off by
    // exactly the divider error.
    let arithmetic = FRAC_1_SQRT_2 - STOCK_R2 / (STOCK_R1 + STOCK_R2);
    let h = build_hadamard_netlist(&DividerDesign::stock());
    let mut per_unit: f64 = 0.0;
    for k in 0..4 {
        let mut v = [0.0; 4];
        v[k] = 1.0;
        let q = ChannelQuad::from_array(v);
        per_unit = per_unit.max(h.eval(&q).max_abs_diff(&apply_gate(&q, GateOp::Hadamard)));
    }
    ensure((per_unit - arithmetic).abs() < 1e-12, || {
        format!("unit-input deviation {per_unit:e} vs divider arithmetic {arithmetic:e}")
    })?;
    ensure((1.7e-5..2.0e-5).contains(&per_unit), || {
        format!("unit-input deviation {per_unit:e}")
    })?;
    Ok(format!(
        "{PROGRAMS} programs, exact worst {worst:.1e}; rounded divider deviation {per_unit:.3e} per unit amplitude"
    ))
}

fn ac7(dir: &Path) -> Check {
    const CASES: usize = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..CASES {
        let p = random_params(&mut rng);
        let q = channels_at(&p, rng.random_range(0.0..1e-3));
        worst = worst.max((q.norm_sqr() - 1.0).abs());
        let gates: Vec<GateOp> = (0..rng.random_range(1..=8)).map(|_| random_gate(&mut rng)).collect();
        worst = worst.max((apply_pipeline(&q, &gates).norm_sqr() - 1.0).abs());
    }
    for demo in ["hadamard", "rphi"] {
        let csv = Csv::parse(&fs::read_to_string(dir.join(format!("{demo}.csv"))).map_err(|e| e.to_string())?)?;
        for base in [1, 5] {
            let cols: Vec<Vec<f64>> = (base..base + 4).map(|c| csv.num(c)).collect();
            for k in 0..cols[0].len() {
                let n: f64 = cols.iter().map(|c| c[k] * c[k]).sum();
                worst = worst.max((n - 1.0).abs());
            }
        }
    }
    ensure(worst < 1e-9, || format!("worst |norm - 1| = {worst:e}"))?;
    Ok(format!(
        "{CASES} samples and pipelines plus demo CSVs, worst |norm - 1| {worst:.1e}"
    ))
}

fn ac8() -> Check {
    const ROUND_TRIPS: usize = 2_000;
    const FUZZ: usize = 20_000;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..ROUND_TRIPS {
        let p = random_program(&mut rng);
        let text = format(&p);
        let back = parse(&text).map_err(|d| format!("case {i}: {}\n{text}", d[0]))?;
        ensure(back == p, || {
            format!("case {i}: round trip changed the program\n{text}")
        })?;
    }

    let seed_text = format(&random_program(&mut rng));
    let alphabet = b"initomegavarphialphabeta=HXRPHI 0123456789.eE+-#\n\r\t\xff\xc3";
    let hook = panic::take_hook();
    panic::set_hook(Box::new(|_| {}));
    let mut outcome = Ok(());
    let mut rejected = 0;
    for i in 0..FUZZ {
        let bytes: Vec<u8> = match i % 3 {
            0 => (0..rng.random_range(0..200)).map(|_| rng.random()).collect(),
            1 => (0..rng.random_range(0..200))
                .map(|_| alphabet[rng.random_range(0..alphabet.len())])
                .collect(),
            _ => {
                let mut b = seed_text.clone().into_bytes();
                for _ in 0..rng.random_range(1..4) {
                    let at = rng.random_range(0..b.len());
                    b[at] = alphabet[rng.random_range(0..alphabet.len())];
                }
                b
            }
        };
        match panic::catch_unwind(|| parse_bytes(&bytes)) {
            Err(_) => {
                outcome = Err(format!("parser panicked on {bytes:?}"));
                break;
            }
            Ok(Err(diags)) if diags.is_empty() => {
                outcome = Err(format!("rejected without diagnostics: {bytes:?}"));
                break;
            }
            Ok(Err(diags)) if diags.iter().any(|d| d.line == 0 || d.column == 0) => {
                outcome = Err(format!("diagnostic without a location: {}", diags[0]));
                break;
            }
            Ok(Err(_)) => rejected += 1,
            Ok(Ok(_)) => {}
        }
    }
    panic::set_hook(hook);
    outcome?;
    Ok(format!(
        "{ROUND_TRIPS} round trips exact; {FUZZ} fuzz inputs, {rejected} rejected with diagnostics, no panics"
    ))
}

fn ac9(dir: &Path) -> Check {
    let prog = dir.join("det.cq");
    fs::write(
        &prog,
        "init omega=6.283185307e9 varphi=0.3 alpha=1.1 beta=-0.4\nH\nRPHI 0.785\nX\nH\n",
    )
    .map_err(|e| e.to_string())?;
    let run = |name: &str| -> Result<Vec<u8>, String> {
        let out = dir.join(name);
        let args = [
            "run",
            prog.to_str().unwrap(),
            "--backend",
            "netlist",
            "--resistor-tol",
            "1",
            "--seed",
            "42",
            "--samples",
            "500",
            "--out",
            out.to_str().unwrap(),
        ];
        let res = cqubit_bin(&args);
        ensure(res.status.success(), || {
            format!("run exited with {:?}", res.status.code())
        })?;
        fs::read(out).map_err(|e| e.to_string())
    };
    let a = run("det_a.csv")?;
    let b = run("det_b.csv")?;
    ensure(a == b, || "two identical runs wrote different bytes".into())?;
    let d1 = cqubit_bin(&["demo", "rphi"]).stdout;
    let d2 = cqubit_bin(&["demo", "rphi"]).stdout;
    ensure(d1 == d2, || "demo output differs between runs".into())?;
    Ok(format!(
        "perturbed netlist run ({} bytes) and demo output byte-identical",
        a.len()
    ))
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let d = dir.path();
    let criteria: Vec<Criterion> = vec![
        ("AC1 hadamard demo waveform", Box::new(|| ac1(d))),
        ("AC2 phase gate demo waveform", Box::new(|| ac2(d))),
        ("AC3 divider design", Box::new(ac3)),
        ("AC4 oracle equivalence", Box::new(ac4)),
        ("AC5 algebraic laws", Box::new(ac5)),
        ("AC6 cross-backend equivalence", Box::new(ac6)),
        ("AC7 normalization", Box::new(|| ac7(d))),
        ("AC8 DSL robustness", Box::new(ac8)),
        ("AC9 determinism", Box::new(|| ac9(d))),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        match check() {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
