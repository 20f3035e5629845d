//! CSV tables.

use evortex_core::analysis::{OamSpectrum, RadialProfile};

fn finish(w: csv::Writer<Vec<u8>>) -> Vec<u8> {
    w.into_inner().expect("in-memory writer")
}

pub fn radial_profile_csv(p: &RadialProfile) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["radius_m", "intensity", "pixels"]).unwrap();
    for ((r, v), n) in p.radii.iter().zip(&p.values).zip(&p.counts) {
        w.write_record([format!("{r:e}"), format!("{v:e}"), n.to_string()]).unwrap();
    }
    finish(w)
}

pub fn oam_spectrum_csv(s: &OamSpectrum) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["ell", "weight"]).unwrap();
    for (l, p) in s.ells().zip(s.weights()) {
        w.write_record([l.to_string(), format!("{p:e}")]).unwrap();
    }
    w.write_record(["remainder".to_string(), format!("{:e}", s.remainder())]).unwrap();
    finish(w)
}
