//! Conversions between laboratory units and atomic units.

/// Hartree energy in electron-volts.
pub const HARTREE_EV: f64 = 27.211_386_245_988;
/// `h·c` in eV·nm.
pub const HC_EV_NM: f64 = 1_239.841_984;
/// Intensity corresponding to a field of one atomic unit, `I = E²·I_au`, in W/cm².
pub const INTENSITY_AU_W_CM2: f64 = 3.509_445_4e16;

/// Carrier angular frequency in atomic units for a vacuum wavelength in nm.
pub fn wavelength_nm_to_omega(lambda_nm: f64) -> f64 {
    HC_EV_NM / lambda_nm / HARTREE_EV
}

pub fn omega_to_wavelength_nm(omega: f64) -> f64 {
    HC_EV_NM / (omega * HARTREE_EV)
}

/// Peak field amplitude in atomic units for a cycle-averaged intensity in W/cm².
pub fn intensity_w_cm2_to_field(intensity: f64) -> f64 {
    (intensity / INTENSITY_AU_W_CM2).sqrt()
}

pub fn field_to_intensity_w_cm2(e0: f64) -> f64 {
    e0 * e0 * INTENSITY_AU_W_CM2
}

pub fn au_to_ev(energy: f64) -> f64 {
    energy * HARTREE_EV
}
