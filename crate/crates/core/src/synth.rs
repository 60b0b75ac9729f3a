//! Synthetic walking scenes with known ground truth.
//!
//! A pinhole camera views a ground plane (`z = 0`, `z` up) carrying two
//! parallel lane markings. Simulated walkers plant footfalls at known ground
//! positions and bob their head sinusoidally; their landmarks are projected
//! into the image, optionally with annotation jitter, and packaged as an
//! annotation document.

use nalgebra::{Matrix3, Vector3};
use rand::Rng;

use crate::gait::{Direction, FrameLandmarks, Outcome, WalkSequence};
use crate::geometry::{Homography, LanePair, Point2};
use crate::pipeline::AnnotationDocument;

#[derive(Debug, Clone, PartialEq)]
pub struct PinholeCamera {
    focal: f64,
    principal: Point2,
    /// World-to-camera rotation; rows are camera right, down, forward.
    rotation: Matrix3<f64>,
    eye: Vector3<f64>,
}

impl PinholeCamera {
    pub fn look_at(eye: [f64; 3], target: [f64; 3], focal: f64, principal: Point2) -> Self {
        let eye = Vector3::from(eye);
        let forward = (Vector3::from(target) - eye).normalize();
        let right = forward.cross(&Vector3::z()).normalize();
        let down = forward.cross(&right);
        let rotation =
            Matrix3::from_rows(&[right.transpose(), down.transpose(), forward.transpose()]);
        Self {
            focal,
            principal,
            rotation,
            eye,
        }
    }

    /// Image of a world point, or `None` if it is behind the camera.
    pub fn project(&self, p: [f64; 3]) -> Option<Point2> {
        let c = self.rotation * (Vector3::from(p) - self.eye);
        if c.z <= 1e-9 {
            return None;
        }
        Some(Point2::new(
            self.focal * c.x / c.z + self.principal.x,
            self.focal * c.y / c.z + self.principal.y,
        ))
    }

    /// Ground plane `(x, y, 0)` to image.
    pub fn ground_homography(&self) -> Homography {
        let k = Matrix3::new(
            self.focal,
            0.0,
            self.principal.x,
            0.0,
            self.focal,
            self.principal.y,
            0.0,
            0.0,
            1.0,
        );
        let t = -(self.rotation * self.eye);
        let mut m = Matrix3::zeros();
        m.set_column(0, &self.rotation.column(0));
        m.set_column(1, &self.rotation.column(1));
        m.set_column(2, &t);
        Homography::new(k * m).expect("camera views the ground plane obliquely")
    }
}

/// Two parallel ground segments from `(x, y0)` to `(x, y0 + length)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundLanes {
    pub x_a: f64,
    pub x_b: f64,
    pub y0: f64,
    pub length: f64,
}

impl GroundLanes {
    pub fn endpoints(&self) -> [[f64; 2]; 4] {
        [
            [self.x_a, self.y0],
            [self.x_a, self.y0 + self.length],
            [self.x_b, self.y0],
            [self.x_b, self.y0 + self.length],
        ]
    }

    pub fn image(&self, camera: &PinholeCamera) -> Option<LanePair> {
        let e = self.endpoints();
        let p = |g: [f64; 2]| camera.project([g[0], g[1], 0.0]);
        Some(LanePair {
            line_a: [p(e[0])?, p(e[1])?],
            line_b: [p(e[2])?, p(e[3])?],
        })
    }
}

impl Default for GroundLanes {
    fn default() -> Self {
        Self {
            x_a: 0.0,
            x_b: 350.0,
            y0: 0.0,
            length: 600.0,
        }
    }
}

/// Parameters of one simulated walk.
///
/// Footfalls `0..=steps` alternate left/right about the walking line. At the
/// first and last frame both feet are planted and the head bob is at the
/// same phase, so the side-view quadrilateral is a true rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkerSpec {
    pub person_id: u32,
    /// Ground position of the walking line where footfall 0 sits.
    pub origin: [f64; 2],
    /// Direction of travel on the ground, radians from +x.
    pub heading: f64,
    pub step_length: f64,
    pub step_width: f64,
    /// Number of footfall gaps; at least 2.
    pub steps: u32,
    pub frames_per_step: u32,
    pub double_support: u32,
    pub body_height: f64,
    /// Bob amplitude as a fraction of body height.
    pub bob_amplitude: f64,
    /// Bob period in frames.
    pub bob_period: f64,
    pub foot_lift: f64,
    pub start_frame: u32,
    pub outcome: Outcome,
}

impl WalkerSpec {
    pub fn new(person_id: u32, origin: [f64; 2], heading: f64) -> Self {
        Self {
            person_id,
            origin,
            heading,
            step_length: 70.0,
            step_width: 10.0,
            steps: 4,
            frames_per_step: 12,
            double_support: 3,
            body_height: 170.0,
            bob_amplitude: 0.03,
            bob_period: 12.0,
            foot_lift: 8.0,
            start_frame: 0,
            outcome: Outcome::NoFall,
        }
    }

    fn axes(&self) -> ([f64; 2], [f64; 2]) {
        let dir = [self.heading.cos(), self.heading.sin()];
        (dir, [-dir[1], dir[0]])
    }

    /// Ground position of footfall `k`.
    pub fn footfall(&self, k: u32) -> [f64; 2] {
        let (dir, normal) = self.axes();
        let along = k as f64 * self.step_length;
        let lateral = if k.is_multiple_of(2) { 0.5 } else { -0.5 } * self.step_width;
        [
            self.origin[0] + along * dir[0] + lateral * normal[0],
            self.origin[1] + along * dir[1] + lateral * normal[1],
        ]
    }

    pub fn footfalls(&self) -> Vec<[f64; 2]> {
        (0..=self.steps).map(|k| self.footfall(k)).collect()
    }

    /// Distance between successive footfalls.
    pub fn true_stride(&self) -> f64 {
        self.step_length.hypot(self.step_width)
    }

    /// Peak-to-peak head bob in percent of height, before smoothing.
    pub fn true_head_range(&self) -> f64 {
        200.0 * self.bob_amplitude
    }

    /// Last frame offset; footfall `steps` lands exactly then.
    pub fn duration(&self) -> u32 {
        (self.steps - 1) * self.frames_per_step
    }

    fn landing(&self, k: u32) -> f64 {
        (k as f64 - 1.0) * self.frames_per_step as f64
    }

    fn lift_off(&self, k: u32) -> f64 {
        self.landing(k) + (self.frames_per_step + self.double_support) as f64
    }

    /// World position and contact flag of the foot with parity `parity` at frame offset `t`.
    fn foot_state(&self, parity: u32, t: f64) -> ([f64; 3], bool) {
        let mut k = parity;
        while k <= self.steps {
            if t >= self.landing(k) && t <= self.lift_off(k) {
                let g = self.footfall(k);
                return ([g[0], g[1], 0.0], true);
            }
            if k + 2 <= self.steps && t > self.lift_off(k) && t < self.landing(k + 2) {
                let from = self.footfall(k);
                let to = self.footfall(k + 2);
                let s = (t - self.lift_off(k)) / (self.landing(k + 2) - self.lift_off(k));
                let z = self.foot_lift * (std::f64::consts::PI * s).sin();
                return (
                    [
                        from[0] + s * (to[0] - from[0]),
                        from[1] + s * (to[1] - from[1]),
                        z,
                    ],
                    false,
                );
            }
            k += 2;
        }
        unreachable!("every frame of the walk has a stance or a swing for each foot");
    }

    pub fn head(&self, t: f64) -> [f64; 3] {
        let (dir, _) = self.axes();
        let along = self.step_length * (0.5 + t / self.frames_per_step as f64);
        let phase = 2.0 * std::f64::consts::PI * t / self.bob_period;
        [
            self.origin[0] + along * dir[0],
            self.origin[1] + along * dir[1],
            self.body_height * (1.0 + self.bob_amplitude * phase.sin()),
        ]
    }

    /// Projects the walk into the image. `jitter` is the half-width, in
    /// pixels, of uniform annotation noise added to every landmark.
    pub fn simulate<R: Rng>(
        &self,
        camera: &PinholeCamera,
        jitter: f64,
        rng: &mut R,
    ) -> WalkSequence {
        assert!(self.steps >= 2, "synthetic walks need at least two steps");
        let mut noisy = |p: [f64; 3]| {
            let q = camera.project(p).expect("walker in front of camera");
            if jitter > 0.0 {
                Point2::new(
                    q.x + rng.gen_range(-jitter..jitter),
                    q.y + rng.gen_range(-jitter..jitter),
                )
            } else {
                q
            }
        };
        let mut frames = Vec::new();
        for t in 0..=self.duration() {
            let tf = t as f64;
            let (left, left_contact) = self.foot_state(0, tf);
            let (right, right_contact) = self.foot_state(1, tf);
            frames.push(FrameLandmarks {
                frame: self.start_frame + t,
                head: noisy(self.head(tf)),
                left_foot: noisy(left),
                right_foot: noisy(right),
                left_contact,
                right_contact,
            });
        }
        let first = self.footfall(0);
        let last = self.footfall(self.steps);
        let image_dx = camera.project([last[0], last[1], 0.0]).unwrap().x
            - camera.project([first[0], first[1], 0.0]).unwrap().x;
        let end_frame = self.start_frame + self.duration();
        WalkSequence {
            person_id: self.person_id,
            start_frame: self.start_frame,
            end_frame,
            obstacle_frame: end_frame + 1,
            direction: if image_dx >= 0.0 {
                Direction::LeftToRight
            } else {
                Direction::RightToLeft
            },
            outcome: self.outcome,
            steps_before_obstacle: Some(self.steps),
            frames,
        }
    }
}

/// A camera looking at `target` from azimuth `azimuth` (radians from +x),
/// horizontal distance `distance` and height `height`.
pub fn orbit_camera(
    target: [f64; 2],
    azimuth: f64,
    distance: f64,
    height: f64,
    focal: f64,
) -> PinholeCamera {
    let eye = [
        target[0] + distance * azimuth.cos(),
        target[1] + distance * azimuth.sin(),
        height,
    ];
    PinholeCamera::look_at(
        eye,
        [target[0], target[1], 0.0],
        focal,
        Point2::new(640.0, 360.0),
    )
}

/// Oblique camera with random pose, viewing `target` from a side of the
/// lanes (azimuth within 55° of the +x / -x axis).
pub fn random_oblique_camera<R: Rng>(rng: &mut R, target: [f64; 2]) -> PinholeCamera {
    let side = if rng.gen_bool(0.5) {
        0.0
    } else {
        std::f64::consts::PI
    };
    let azimuth = side + rng.gen_range(-55f64..55.0).to_radians();
    let distance = rng.gen_range(900.0..1600.0);
    let height = rng.gen_range(350.0..900.0);
    let focal = rng.gen_range(700.0..1300.0);
    orbit_camera(target, azimuth, distance, height, focal)
}

/// A complete synthetic scene and the parameters that generated it.
#[derive(Debug, Clone)]
pub struct SyntheticScene {
    pub camera: PinholeCamera,
    pub lanes: GroundLanes,
    pub walkers: Vec<WalkerSpec>,
    pub document: AnnotationDocument,
}

/// Builds an annotation document for `walkers` seen by `camera`.
pub fn scene<R: Rng>(
    camera: PinholeCamera,
    lanes: GroundLanes,
    walkers: Vec<WalkerSpec>,
    jitter: f64,
    rng: &mut R,
) -> SyntheticScene {
    let sequences = walkers
        .iter()
        .map(|w| w.simulate(&camera, jitter, rng))
        .collect();
    let document = AnnotationDocument {
        video_id: "synthetic".into(),
        frame_rate: 25.0,
        lane_calibration: Some(lanes.image(&camera).expect("lanes visible")),
        sequences,
    };
    SyntheticScene {
        camera,
        lanes,
        walkers,
        document,
    }
}

/// The three-person scene bundled as `fixtures/synthetic_walks.json`.
pub fn demo_scene<R: Rng>(rng: &mut R) -> SyntheticScene {
    let camera = orbit_camera([175.0, 300.0], 200f64.to_radians(), 1200.0, 600.0, 1000.0);
    let mut a = WalkerSpec::new(1, [120.0, 40.0], std::f64::consts::FRAC_PI_2);
    a.outcome = Outcome::Fall;
    a.start_frame = 10;
    let mut b = WalkerSpec::new(2, [250.0, 560.0], -std::f64::consts::FRAC_PI_2);
    b.step_length = 85.0;
    b.steps = 3;
    b.bob_amplitude = 0.02;
    b.bob_period = 36.0;
    b.frames_per_step = 18;
    b.start_frame = 120;
    let mut c = WalkerSpec::new(3, [60.0, 100.0], 1.2);
    c.step_length = 60.0;
    c.steps = 5;
    c.bob_amplitude = 0.04;
    c.bob_period = 16.0;
    c.frames_per_step = 16;
    c.start_frame = 300;
    c.outcome = Outcome::Fall;
    scene(camera, GroundLanes::default(), vec![a, b, c], 0.4, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn camera_projects_target_to_principal_point() {
        let cam = orbit_camera([100.0, 50.0], 0.3, 1000.0, 500.0, 900.0);
        let p = cam.project([100.0, 50.0, 0.0]).unwrap();
        assert!(p.distance(&Point2::new(640.0, 360.0)) < 1e-9);
        // Higher world points appear higher in the image.
        let up = cam.project([100.0, 50.0, 100.0]).unwrap();
        assert!(up.y < p.y);
    }

    #[test]
    fn ground_homography_matches_projection() {
        let cam = orbit_camera([0.0, 0.0], 2.0, 1300.0, 700.0, 1100.0);
        let h = cam.ground_homography();
        for g in [[0.0, 0.0], [120.0, -40.0], [-300.0, 500.0]] {
            let a = h.apply(Point2::new(g[0], g[1])).unwrap();
            let b = cam.project([g[0], g[1], 0.0]).unwrap();
            assert!(a.distance(&b) < 1e-8);
        }
    }

    #[test]
    fn walker_alternates_feet_with_double_support_at_ends() {
        let cam = orbit_camera([0.0, 200.0], 0.0, 1200.0, 600.0, 1000.0);
        let spec = WalkerSpec::new(4, [0.0, 0.0], std::f64::consts::FRAC_PI_2);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let walk = spec.simulate(&cam, 0.0, &mut rng);
        assert!(walk.check_invariants().is_ok());
        let first = walk.frames.first().unwrap();
        let last = walk.frames.last().unwrap();
        assert!(first.left_contact && first.right_contact);
        assert!(last.left_contact && last.right_contact);
        assert!(walk
            .frames
            .iter()
            .all(|f| f.left_contact || f.right_contact));
        assert_eq!(walk.steps_before_obstacle, Some(4));
    }
}
