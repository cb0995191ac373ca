//! Orbit cameras from (pitch, yaw, scale) pose parameters.

use relight_core::error::{CoreError, Result};
use relight_core::math::{Aabb, Vec3};
use relight_core::OrthoCamera;

/// Camera orbiting the mesh centroid: yaw rotates about the world up axis
/// (+Y), pitch tilts the orbit upward, and the view rectangle is the
/// bounding-sphere radius divided by `scale` (larger scale fills more of
/// the frame). The pose moves the camera, never the model; pitch = yaw = 0
/// looks along -Z.
pub fn camera_from_pose(
    pitch_deg: f64,
    yaw_deg: f64,
    scale: f64,
    bounds: &Aabb,
    image_w: usize,
    image_h: usize,
) -> Result<OrthoCamera> {
    let radius = bounds.diagonal() / 2.0;
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(CoreError::Structure(
            "mesh bounds are degenerate (zero extent)".into(),
        ));
    }
    if !(scale > 0.0) {
        return Err(CoreError::Precondition(format!("scale must be positive, got {scale}")));
    }
    if pitch_deg.abs() >= 89.0 {
        return Err(CoreError::Precondition(format!(
            "pitch {pitch_deg} too close to the pole for a +Y-up camera"
        )));
    }

    let pitch = pitch_deg.to_radians();
    let yaw = yaw_deg.to_radians();
    let eye_dir = Vec3::new(0.0, pitch.sin(), pitch.cos()).rotated_y(yaw);
    let forward = -eye_dir;
    let up = (Vec3::Y - forward * Vec3::Y.dot(forward)).normalized();
    let right_dir = forward.cross(up);

    let half_v = radius / scale;
    let half_h = half_v * image_w as f64 / image_h as f64;
    let center = bounds.center() + eye_dir * (2.0 * radius);

    OrthoCamera::new(
        image_w,
        image_h,
        center,
        right_dir * half_h,
        up * half_v,
        forward,
    )
}
