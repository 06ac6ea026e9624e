//! Builtin norms and maps, as printed by `quasifix catalog`.

pub struct Entry {
    pub name: &'static str,
    pub params: &'static str,
    pub summary: &'static str,
    pub origin: &'static str,
}

pub const NORMS: &[Entry] = &[
    Entry {
        name: "standard_p",
        params: "p: number >= 1 or \"inf\"; dim?: integer",
        summary: "(sum |x_i|^p)^(1/p), max |x_i| for inf; C = 1",
        origin: "ordinary l_p norm",
    },
    Entry {
        name: "maligranda_ap",
        params: "a: number > 0; p: number >= 1 or \"inf\"; dim = 2",
        summary: "||(x1,x2)||_p if x2 != 0, else a|x1|; C = max(a, 1/a)",
        origin: "Maligranda's two-branch quasi-norm on R^2; reflection example",
    },
    Entry {
        name: "tychonoff_half",
        params: "dim?: integer",
        summary: "(sum sqrt|x_i|)^2; C = 2, a 1/2-norm",
        origin: "Tychonoff's l_1/2 quasi-norm, finite truncation",
    },
    Entry {
        name: "p_quasi",
        params: "p: number in (0, 1); dim?: integer",
        summary: "(sum |x_i|^p)^(1/p); C = 2^(1/p - 1)",
        origin: "l_p for p < 1, extremal for the Aoki-Rolewicz exponent",
    },
];

pub const MAPS: &[Entry] = &[
    Entry {
        name: "affine",
        params: "matrix: [[number]]; offset: [number]; domain?",
        summary: "x -> A x + v; theta = |b + alpha| for A = alpha I",
        origin: "linear test problems, e.g. A = I/2 and A = 2I",
    },
    Entry {
        name: "reflection",
        params: "dim?: integer; domain?",
        summary: "x -> 1 - x coordinate-wise; (b, |1 - b|)-enriched, not a contraction for b = 0",
        origin: "reflection example, Fix = {(1/2, 1/2)} under maligranda_ap",
    },
    Entry {
        name: "step",
        params: "domain?",
        summary: "on R: 0 for x <= 2, -1/3 for x > 2; discontinuous, its square is identically 0",
        origin: "iterate-contraction example (N = 2)",
    },
    Entry {
        name: "power",
        params: "inner: map; n_iter: integer >= 1; domain?",
        summary: "n_iter-fold composition of inner",
        origin: "iterate powers U^N",
    },
    Entry {
        name: "expr",
        params: "exprs: [string], one formula per coordinate over x1..xn; domain?",
        summary: "numbers, + - * /, unary -, abs min max, if(c, a, b), comparisons",
        origin: "user-defined maps",
    },
    Entry {
        name: "averaged",
        params: "inner: map; lambda: number in (0, 1]; domain?",
        summary: "x -> (1 - lambda) x + lambda inner(x); same fixed points as inner",
        origin: "Krasnoselskij averaging",
    },
];

/// Stable, deterministic listing of every catalog entry.
pub fn list_catalog() -> String {
    let mut out = String::new();
    for (title, entries) in [("norms", NORMS), ("maps", MAPS)] {
        out.push_str(title);
        out.push_str(":\n");
        for e in entries {
            out.push_str(&format!(
                "  {}\n    params: {}\n    {}\n    origin: {}\n",
                e.name, e.params, e.summary, e.origin
            ));
        }
    }
    out
}
