use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{ProfileError, ShockProfile};

/// One row of the profile CSV (`zeta,v,u`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub zeta: f64,
    pub v: f64,
    pub u: f64,
}

pub fn write_profile_csv<W: Write>(profile: &ShockProfile, out: W) -> Result<(), ProfileError> {
    let mut w = csv::Writer::from_writer(out);
    for (zeta, v, u) in profile.samples() {
        w.serialize(ProfileSample { zeta, v, u })?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_profile_csv<R: Read>(input: R) -> Result<Vec<ProfileSample>, ProfileError> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["zeta", "v", "u"] {
        return Err(ProfileError::Precondition(format!(
            "profile csv header must be zeta,v,u, got {}",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    r.deserialize()
        .map(|row| row.map_err(ProfileError::from))
        .collect()
}
