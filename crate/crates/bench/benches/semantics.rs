use criterion::{black_box, criterion_group, criterion_main, Criterion};
use linctx::lts::{trace_equiv, traces, ArgumentPool, Bounds};
use linctx::metatheory::{Enumerator, Universe};
use linctx::reduction::evaluate;
use linctx::{check_program, parse_term, parse_type, Term};

const F1: &str = "val(fn! x:Nat. val(0) |~| val(1))";
const F2: &str = "val(fn! x:Nat. val(0)) |~| val(fn! x:Nat. val(1))";
const DISTINGUISHER: &str =
    "bind! f = val(fn! x:Nat. val(0) |~| val(1)) in bind! x = f 0 in bind! y = f 0 in val(eq x y)";

fn term(src: &str) -> Term {
    parse_term(src).unwrap()
}

fn bench_evaluate(c: &mut Criterion) {
    let d = term(DISTINGUISHER);
    c.bench_function("evaluate/distinguisher", |b| {
        b.iter(|| evaluate(black_box(&d), 1000).unwrap())
    });
    let count = term("fix[Nat -> Nat] (fn! f:Nat -> Nat. fn! n:Nat. if iszero n then 0 else succ (f (pred n))) 40");
    c.bench_function("evaluate/fix_countdown_40", |b| {
        b.iter(|| evaluate(black_box(&count), 5000).unwrap())
    });
}

fn bench_traces(c: &mut Criterion) {
    let pool = ArgumentPool::new(2);
    let (f1, f2) = (term(F1), term(F2));
    for depth in [3, 5] {
        c.bench_function(&format!("traces/f1_depth{depth}"), |b| {
            b.iter(|| traces(black_box(&f1), Bounds::new(depth, 1000), &pool).unwrap())
        });
    }
    c.bench_function("trace_equiv/f1_f2_depth5", |b| {
        b.iter(|| trace_equiv(black_box(&f1), &f2, Bounds::new(5, 1000), &pool).unwrap())
    });
}

fn bench_typing(c: &mut Criterion) {
    let d = term(DISTINGUISHER);
    c.bench_function("typing/distinguisher", |b| {
        b.iter(|| check_program(black_box(&d)).unwrap())
    });
}

fn bench_enumeration(c: &mut Criterion) {
    let ty = parse_type("Nat -o Nat").unwrap();
    c.bench_function("enumerate/lpcf_nat_to_nat_size6", |b| {
        b.iter(|| {
            Enumerator::new(Universe::lpcf())
                .closed(black_box(&ty), 6)
                .len()
        })
    });
}

criterion_group!(
    benches,
    bench_evaluate,
    bench_traces,
    bench_typing,
    bench_enumeration
);
criterion_main!(benches);
