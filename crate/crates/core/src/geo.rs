//! Great-circle distances between geocoded affiliations.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const EARTH_RADIUS_KM: f64 = 6371.0;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum GeoError {
    #[error("invalid coordinates ({lat}, {lon})")]
    InvalidCoordinates { lat: f64, lon: f64 },
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Result<Self, GeoError> {
        let p = GeoPoint { lat, lon };
        if p.is_valid() {
            Ok(p)
        } else {
            Err(GeoError::InvalidCoordinates { lat, lon })
        }
    }

    pub fn is_valid(&self) -> bool {
        self.lat.is_finite()
            && self.lon.is_finite()
            && (-90.0..=90.0).contains(&self.lat)
            && (-180.0..=180.0).contains(&self.lon)
    }
}

/// Haversine distance in kilometres on a sphere of radius 6371 km.
pub fn great_circle_km(a: GeoPoint, b: GeoPoint) -> Result<f64, GeoError> {
    for p in [a, b] {
        if !p.is_valid() {
            return Err(GeoError::InvalidCoordinates { lat: p.lat, lon: p.lon });
        }
    }
    let lat1 = a.lat.to_radians();
    let lat2 = b.lat.to_radians();
    let dlat = (b.lat - a.lat).to_radians();
    let dlon = (b.lon - a.lon).to_radians();
    let h = (dlat / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / 2.0).sin().powi(2);
    // Rounding can push h a hair above 1 for antipodal points.
    let c = 2.0 * h.sqrt().min(1.0).asin();
    Ok(EARTH_RADIUS_KM * c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(lat: f64, lon: f64) -> GeoPoint {
        GeoPoint::new(lat, lon).unwrap()
    }

    #[test]
    fn identical_points() {
        assert_eq!(great_circle_km(p(52.16, 4.49), p(52.16, 4.49)).unwrap(), 0.0);
    }

    #[test]
    fn antipodal_points() {
        let d = great_circle_km(p(0.0, 0.0), p(0.0, 180.0)).unwrap();
        assert!((d - std::f64::consts::PI * EARTH_RADIUS_KM).abs() < 1e-6);
        assert!((d - 20015.1).abs() < 0.1);
    }

    #[test]
    fn one_degree_along_equator_and_meridian() {
        let expected = EARTH_RADIUS_KM * std::f64::consts::PI / 180.0;
        let along_equator = great_circle_km(p(0.0, 0.0), p(0.0, 1.0)).unwrap();
        let along_meridian = great_circle_km(p(10.0, 5.0), p(11.0, 5.0)).unwrap();
        assert!((along_equator - expected).abs() < 1e-9);
        assert!((along_meridian - expected).abs() < 1e-9);
        assert!((expected - 111.19).abs() < 0.01);
    }

    #[test]
    fn invalid_coordinates_rejected() {
        assert!(GeoPoint::new(91.0, 0.0).is_err());
        let bad = GeoPoint { lat: 0.0, lon: 200.0 };
        assert_eq!(
            great_circle_km(bad, p(0.0, 0.0)),
            Err(GeoError::InvalidCoordinates { lat: 0.0, lon: 200.0 })
        );
    }
}
