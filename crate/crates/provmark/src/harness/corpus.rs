//! Deterministic synthetic corpus: plain subject-language functions with
//! self-checking asserts, generated to spread anchor counts across all
//! capacity cases. Every file is executable Python; the asserts double as
//! unit tests for the fidelity checks.

#[derive(Debug, Clone)]
pub struct CorpusFile {
    pub name: String,
    pub source: String,
    /// Intended formal-channel capacity: "case1", "case2", "case3", "ham",
    /// or "none".
    pub family: &'static str,
}

const NAME_POOL: &[&str] = &[
    "count", "total", "value", "score", "level", "width", "depth", "index", "shift", "ratio",
    "delta", "gamma", "omega", "limit", "speed", "bonus", "share", "weight", "offset", "margin",
    "cursor", "budget", "volume", "streak", "window", "rank", "phase", "slot", "tally", "unit",
];

fn names(start: usize, take: usize) -> Vec<&'static str> {
    (0..take)
        .map(|i| NAME_POOL[(start + i) % NAME_POOL.len()])
        .collect()
}

/// Accumulator function: `k` R1 anchors, two variables.
fn accumulator(idx: usize, k: usize, family: &'static str) -> CorpusFile {
    let v = names(idx * 2, 2);
    let (n, acc) = (v[0], v[1]);
    let fname = format!("calc{idx}");
    let mut body = format!("def {fname}({n}):\n    {acc} = 0\n");
    let sim = |arg: i64| {
        let mut t = 0i64;
        for i in 0..k {
            let c = (i % 7 + 1) as i64;
            if i % 5 == 4 {
                t *= 2;
            } else if i % 2 == 0 {
                t += c;
            } else {
                t -= c;
            }
        }
        t + arg
    };
    for i in 0..k {
        let c = i % 7 + 1;
        let line = if i % 5 == 4 {
            format!("    {acc} = {acc} * 2\n")
        } else if i % 2 == 0 {
            format!("    {acc} = {acc} + {c}\n")
        } else {
            format!("    {acc} = {acc} - {c}\n")
        };
        body.push_str(&line);
    }
    body.push_str(&format!("    return {acc} + {n}\n"));
    body.push_str(&format!("\nassert {fname}(7) == {}\n", sim(7)));
    body.push_str(&format!("assert {fname}(0) == {}\n", sim(0)));
    CorpusFile {
        name: format!("{family}_{idx:03}.py"),
        source: body,
        family,
    }
}

fn rich_expected(a: i64, b: i64, c: i64, d: i64, extras: &[i64]) -> i64 {
    let mut t = (a + b) * 2;
    t += extras.iter().sum::<i64>();
    if a != b {
        t += 1;
    }
    t += c * (c - 1) / 2;
    t + d
}

/// Full-spread function exercising every rule: `extra` + 11 formal anchors,
/// ten variables across two defs.
fn rich(idx: usize, extra: usize, family: &'static str) -> CorpusFile {
    let v = names(idx * 3 + 1, 10);
    let (a, b, c, d, t, i, j, l, x, y) =
        (v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9]);
    let f1 = format!("mix{idx}");
    let f2 = format!("gate{idx}");
    let extras: Vec<i64> = (0..extra as i64).map(|e| e % 9 + 1).collect();
    let mut body = format!(
        "def {f1}({a}, {b}, {c}, {d}):\n    {t} = 0\n    {t} = {t} + {a}\n    {t} = {t} + {b}\n    {t} = {t} * 2\n"
    );
    for e in &extras {
        body.push_str(&format!("    {t} = {t} + {e}\n"));
    }
    body.push_str(&format!(
        "    if not ({a} == {b}):\n        {t} = {t} + 1\n    while {t} < 0:\n        {t} = {t} + 100\n    for {i} in range(0, {c}):\n        {t} = {t} + {i}\n    {l} = []\n    for {j} in range(0, {d}):\n        {l}.append({j} * {j})\n    {t} = {t} + len({l})\n    return {t}\n"
    ));
    body.push_str(&format!(
        "\ndef {f2}({x}, {y}):\n    if {x} > {y}:\n        return True\n    else:\n        return False\n"
    ));
    body.push_str(&format!(
        "\nassert {f1}(2, 3, 4, 1) == {}\n",
        rich_expected(2, 3, 4, 1, &extras)
    ));
    body.push_str(&format!(
        "assert {f1}(5, 5, 3, 2) == {}\n",
        rich_expected(5, 5, 3, 2, &extras)
    ));
    body.push_str(&format!("assert {f2}(3, 1) == True\n"));
    body.push_str(&format!("assert {f2}(0, 2) == False\n"));
    CorpusFile {
        name: format!("{family}_{idx:03}.py"),
        source: body,
        family,
    }
}

fn anchorless(idx: usize) -> CorpusFile {
    let value = 40 + idx;
    let fname = format!("fixed{idx}");
    CorpusFile {
        name: format!("none_{idx:03}.py"),
        source: format!("def {fname}():\n    return {value}\n\nassert {fname}() == {value}\n"),
        family: "none",
    }
}

/// The bundled corpus: 104 files spanning all capacity cases.
pub fn corpus() -> Vec<CorpusFile> {
    let mut files = Vec::new();
    for i in 0..40 {
        files.push(rich(i, 2 + i % 7, "case1"));
    }
    for i in 0..12 {
        files.push(rich(40 + i, 11 + i % 5, "ham"));
    }
    for i in 0..12 {
        files.push(accumulator(52 + i, 12 + i % 8, "case1acc"));
    }
    for i in 0..20 {
        files.push(accumulator(64 + i, 6 + i % 6, "case2"));
    }
    for i in 0..16 {
        files.push(accumulator(84 + i, 2 + i % 4, "case3"));
    }
    for i in 0..4 {
        files.push(anchorless(i));
    }
    files
}

/// Reference file for the indistinguishability experiments: well over twelve
/// formal anchors and ten variables.
pub fn reference_template() -> CorpusFile {
    rich(999, 4, "template")
}
