//! The single-precision aliases run the same pipeline at reduced accuracy.

use propagate_core::analysis::{estimate_speed, track_front, Direction};
use propagate_core::sim::{ic_bump_h, run, SimConfig};
use propagate_core::speeds::{principal_root, spreading_speed};
use propagate_core::{Grid1D32, ScalarShiftModel32, Side};

#[test]
fn fisher_speed_in_f32() {
    let r = spreading_speed(&ScalarShiftModel32::fisher(), Side::Plus).unwrap();
    assert!((r.c_star - 2.0).abs() < 1e-3, "{}", r.c_star);
    assert!((r.nu_star - 1.0).abs() < 2e-2, "{}", r.nu_star);
}

#[test]
fn delayed_root_in_f32() {
    let z: f32 = principal_root(0.0, 1.0, 1.0).unwrap();
    assert!((z - 0.567_143_3).abs() < 1e-5);
}

#[test]
fn fisher_front_in_f32() {
    let m = ScalarShiftModel32::fisher();
    let g = Grid1D32::with_spacing(-100.0, 100.0, 0.25).unwrap();
    let traj = run(&m, &ic_bump_h(&g, 1.0).unwrap(), &SimConfig::new(0.05, 30.0).with_stride(10)).unwrap();
    let trace = track_front(&traj, 0.5, Direction::Rightmost, 0).unwrap();
    let (speed, _) = estimate_speed(&trace, 0.4).unwrap();
    assert!((1.8..2.05).contains(&speed), "{speed}");
}
