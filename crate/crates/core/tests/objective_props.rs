use proptest::prelude::*;
use vc_offload::io::{instance_from_json, instance_to_json};
use vc_offload::scenario::{generate, ScenarioSpec, TrafficRegime, VmCount};
use vc_offload::solvers::solve_crrm;
use vc_offload::{
    assignment_feasible, completion_times, exchange_cost, objective, validate_instance, Assignment, ComponentId,
    Instance64, OmegaMode, TaskEdge, TaskGraph, VmRef,
};

fn instance(seed: u64, tasks: usize, sps: usize, mode: OmegaMode) -> Instance64 {
    let regime = if seed % 2 == 0 { TrafficRegime::LowTraffic } else { TrafficRegime::RushHour };
    let mut spec = ScenarioSpec::new(tasks, sps, VmCount::Range { min: 3, max: 8 }, regime, seed);
    spec.omega_mode = mode;
    generate(&spec).unwrap()
}

fn solved(inst: &Instance64, seed: u64) -> Option<Assignment> {
    solve_crrm(inst, 300, seed).unwrap().assignment
}

fn free_vms(inst: &Instance64, a: &Assignment) -> Vec<VmRef> {
    let used = a.sequence();
    inst.vc().slots().map(|s| s.vm_ref()).filter(|v| !used.contains(v)).collect()
}

fn reassign(a: &Assignment, c: ComponentId, vm: VmRef) -> Assignment {
    let mut slots = a.slots().to_vec();
    slots[c.task][c.component] = vm;
    Assignment::new(slots)
}

fn mode(flag: bool) -> OmegaMode {
    if flag {
        OmegaMode::DerivedMin
    } else {
        OmegaMode::Static
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn json_round_trip(seed in any::<u64>(), tasks in 1usize..5, sps in 1usize..7, derived in any::<bool>()) {
        let inst = instance(seed, tasks, sps, mode(derived));
        let back: Instance64 = instance_from_json(&instance_to_json(&inst)).unwrap();
        prop_assert_eq!(back, inst);
    }

    #[test]
    fn generated_instances_validate(seed in any::<u64>(), tasks in 1usize..6, sps in 1usize..9) {
        prop_assert!(validate_instance(&instance(seed, tasks, sps, OmegaMode::Static)).is_empty());
    }

    #[test]
    fn slower_vm_never_lowers_completion_norm(seed in 0u64..5000, pick in any::<prop::sample::Index>()) {
        let inst = instance(seed, 2, 4, OmegaMode::Static);
        let Some(a) = solved(&inst, seed) else { return Ok(()) };
        let comps: Vec<ComponentId> = inst.components().collect();
        let c = comps[pick.index(comps.len())];
        let cur = inst.vc().exec_time(a.slot(c));
        let before = objective(&inst, &a).completion_norm;
        for v in free_vms(&inst, &a) {
            let t = inst.vc().exec_time(v);
            if t >= cur && t <= inst.deadline(c) {
                let after = objective(&inst, &reassign(&a, c, v)).completion_norm;
                prop_assert!(after >= before);
            }
        }
    }

    #[test]
    fn exchange_cost_depends_only_on_sps(seed in 0u64..5000, pick in any::<prop::sample::Index>()) {
        let inst = instance(seed, 2, 3, OmegaMode::Static);
        let Some(a) = solved(&inst, seed) else { return Ok(()) };
        let comps: Vec<ComponentId> = inst.components().collect();
        let c = comps[pick.index(comps.len())];
        let sp = a.slot(c).sp;
        let before = exchange_cost(&inst, &a);
        for v in free_vms(&inst, &a).into_iter().filter(|v| v.sp == sp) {
            prop_assert_eq!(exchange_cost(&inst, &reassign(&a, c, v)), before);
        }
    }

    #[test]
    fn exchange_cost_scales(seed in 0u64..5000, alpha in 0.01f64..100.0, k in -4i32..5) {
        let inst = instance(seed, 3, 4, OmegaMode::Static);
        let Some(a) = solved(&inst, seed) else { return Ok(()) };
        let base = exchange_cost(&inst, &a);
        let scaled = |f: f64| {
            let costs = inst.exch_costs().map(|c| c * f);
            let i = Instance64::new(inst.tasks().to_vec(), inst.vc().clone(), costs, inst.params());
            exchange_cost(&i, &a)
        };
        prop_assert!((scaled(alpha) - alpha * base).abs() <= 1e-12 * (alpha * base).abs());
        // powers of two scale every term exactly
        let p = 2f64.powi(k);
        prop_assert_eq!(scaled(p), p * base);
    }

    #[test]
    fn relabeling_components_changes_nothing(seed in 0u64..5000, derived in any::<bool>(), rot in 1usize..7) {
        let inst = instance(seed, 2, 4, mode(derived));
        let Some(a) = solved(&inst, seed) else { return Ok(()) };
        // rotate component labels of task 0: old i becomes (i + rot) mod n
        let t0 = inst.task(0);
        let n = t0.num_components();
        let new = |i: usize| (i + rot) % n;
        let mut deadlines = vec![0.0; n];
        for i in 0..n {
            deadlines[new(i)] = t0.deadline(i);
        }
        let edges = t0.edges().iter().map(|e| TaskEdge::new(new(e.a), new(e.b), e.omega)).collect();
        let mut tasks = inst.tasks().to_vec();
        tasks[0] = TaskGraph::new(deadlines, edges);
        let relabeled = Instance64::new(tasks, inst.vc().clone(), inst.exch_costs().clone(), inst.params());
        let mut slots = a.slots().to_vec();
        for i in 0..n {
            slots[0][new(i)] = a.slots()[0][i];
        }
        let b = Assignment::new(slots);

        prop_assert_eq!(assignment_feasible(&inst, &a).is_ok(), assignment_feasible(&relabeled, &b).is_ok());
        prop_assert_eq!(completion_times(&inst, &a), completion_times(&relabeled, &b));
        let (x, y) = (objective(&inst, &a), objective(&relabeled, &b));
        prop_assert_eq!(x.completion_norm, y.completion_norm);
        prop_assert!((x.exchange_cost - y.exchange_cost).abs() <= 1e-12 * x.exchange_cost.abs().max(1.0));
        prop_assert!((x.total - y.total).abs() <= 1e-12 * x.total.abs());
    }
}

#[test]
fn f32_instances_evaluate() {
    let inst = instance(3, 2, 4, OmegaMode::Static);
    let inst32: vc_offload::Instance32 = instance_from_json(&instance_to_json(&inst)).unwrap();
    let a = solved(&inst, 3).expect("seed 3 is feasible");
    let (x, y) = (objective(&inst, &a), objective(&inst32, &a));
    assert!((x.total as f32 - y.total).abs() < 1e-5);
}
