#![allow(dead_code)]

use monty_lab::oracle::{self, OutcomeAtom};
use monty_lab::probability::prob;
use monty_lab::{GuestStrategy, HostAction, Probability, ShowmasterStrategy};
use num_rational::BigRational;
use num_traits::Zero;

/// Every fraction in [0, 1] with denominator at most `max_den`, ascending.
pub fn farey(max_den: u64) -> Vec<Probability> {
    let mut out: Vec<Probability> = (1..=max_den).flat_map(|d| (0..=d).map(move |n| prob(n, d))).collect();
    out.sort_by(|a, b| a.ratio().cmp(b.ratio()));
    out.dedup();
    out
}

pub fn quarters() -> Vec<Probability> {
    (0..=4).map(|n| prob(n, 4)).collect()
}

pub fn same_kind(a: HostAction, b: HostAction) -> bool {
    matches!(
        (a, b),
        (HostAction::OpenedGuestDoor, HostAction::OpenedGuestDoor)
            | (HostAction::OpenedOtherDoor(_), HostAction::OpenedOtherDoor(_))
    )
}

/// Posterior on evil and on the car behind the last pick after a sequence of
/// games against one host whose mood was drawn once.
pub fn oracle_posterior(prior: &Probability, actions: &[HostAction]) -> Option<(BigRational, BigRational)> {
    let trees: [(BigRational, Vec<OutcomeAtom>); 2] = [
        (prior.ratio().clone(), oracle::enumerate(&ShowmasterStrategy::Evil, &GuestStrategy::Stay)),
        (prior.complement().into_ratio(), oracle::enumerate(&ShowmasterStrategy::Fair, &GuestStrategy::Stay)),
    ];
    let (last, earlier) = actions.split_last()?;
    let mut joint_evil = BigRational::zero();
    let mut joint_total = BigRational::zero();
    let mut joint_car = BigRational::zero();
    for (i, (weight, atoms)) in trees.iter().enumerate() {
        let mut w = weight.clone();
        for a in earlier {
            w *= oracle::event_probability(atoms, |x| same_kind(x.host_action, *a)).into_ratio();
        }
        let p_last = oracle::event_probability(atoms, |x| same_kind(x.host_action, *last)).into_ratio();
        let p_car =
            oracle::event_probability(atoms, |x| same_kind(x.host_action, *last) && x.car_behind_pick()).into_ratio();
        if i == 0 {
            joint_evil += &w * &p_last;
        }
        joint_total += &w * p_last;
        joint_car += w * p_car;
    }
    if joint_total.is_zero() {
        return None;
    }
    Some((joint_evil / &joint_total, joint_car / joint_total))
}

pub fn r(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}
