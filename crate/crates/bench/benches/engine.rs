use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};
use qcell_core::{CrystalLabel, Engine, NCElement};

// Every iteration gets a fresh engine so that the per-weight caches start empty.
fn fresh(ty: &str) -> Engine {
    Engine::from_type(ty).unwrap()
}

fn pairing(c: &mut Criterion) {
    let x = NCElement::word(vec![0, 1, 0, 1, 1, 0]);
    let y = NCElement::word(vec![1, 1, 0, 0, 0, 1]);
    c.bench_function("pair B2 height 6", |b| {
        b.iter_batched(|| fresh("B2"), |e| black_box(e.pair(&x, &y).unwrap()), BatchSize::SmallInput)
    });
    c.bench_function("weight space B2 (3,3)", |b| {
        b.iter_batched(|| fresh("B2"), |e| black_box(e.weight_space(&[3, 3]).unwrap().dim()), BatchSize::SmallInput)
    });
}

fn pbw(c: &mut Criterion) {
    c.bench_function("PBW vectors A3 height 4", |b| {
        b.iter_batched(
            || fresh("A3"),
            |e| {
                let word = e.reference_word();
                for beta in [[1, 2, 1], [2, 1, 1], [1, 1, 2]] {
                    for cs in e.pbw_exponents(&word, &beta) {
                        black_box(e.pbw_vector(&cs, &word).unwrap());
                    }
                }
            },
            BatchSize::SmallInput,
        )
    });
}

fn canonical(c: &mut Criterion) {
    c.bench_function("dual canonical basis A2 (3,3)", |b| {
        b.iter_batched(|| fresh("A2"), |e| black_box(e.dcb_space(&[0, 1, 0], &[3, 3]).unwrap().dim()), BatchSize::SmallInput)
    });
    c.bench_function("dual canonical basis B2 (2,3)", |b| {
        b.iter_batched(|| fresh("B2"), |e| black_box(e.dcb_space(&e.reference_word(), &[2, 3]).unwrap().dim()), BatchSize::SmallInput)
    });
}

fn minors(c: &mut Criterion) {
    c.bench_function("minor D(w0 rho, rho) in B2", |b| {
        b.iter_batched(
            || fresh("B2"),
            |e| {
                let rd = e.root_datum();
                let w0 = rd.longest_element();
                black_box(e.quantum_minor(&w0, &qcell_core::WeylElt::identity(), &rd.rho()).unwrap())
            },
            BatchSize::SmallInput,
        )
    });
}

fn twist(c: &mut Criterion) {
    c.bench_function("twist of a localized basis element in A2", |b| {
        b.iter_batched(
            || fresh("A2").with_height_cap(16),
            |e| {
                let w0 = e.root_datum().longest_element();
                let label = CrystalLabel::new(e.reference_word(), vec![1, 1, 0]);
                let x = e.localized_basis_element(&w0, &[1, 0], &label).unwrap();
                black_box(e.twist_auto(&x).unwrap())
            },
            BatchSize::SmallInput,
        )
    });
}

fn mutation(c: &mut Criterion) {
    c.bench_function("A3 seed and a mutation path", |b| {
        b.iter_batched(
            || fresh("A3"),
            |e| {
                let word = [0, 1, 0, 2, 1, 0];
                let w0 = e.root_datum().longest_element();
                let seed = e.initial_seed(&w0, &word).unwrap();
                black_box(e.mutate_path(&seed, &[0, 1, 2, 0]).unwrap())
            },
            BatchSize::SmallInput,
        )
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = pairing, pbw, canonical, minors, twist, mutation
}
criterion_main!(benches);
