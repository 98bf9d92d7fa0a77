//! One-dimensional graded coordinate arrays.

use crate::error::{Error, Result};

/// Which end of a region carries the target (smallest) element size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bias {
    Uniform,
    FineAtStart,
    FineAtEnd,
}

/// One region of an axis. Sizes grow geometrically away from the fine end.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedRegion {
    pub length: f64,
    /// Element size at the refinement target.
    pub size: f64,
    pub growth: f64,
    pub bias: Bias,
    pub max_size: Option<f64>,
}

impl GradedRegion {
    pub fn uniform(length: f64, size: f64) -> Self {
        GradedRegion {
            length,
            size,
            growth: 1.0,
            bias: Bias::Uniform,
            max_size: None,
        }
    }

    pub fn graded(length: f64, size: f64, growth: f64, bias: Bias, max_size: Option<f64>) -> Self {
        GradedRegion {
            length,
            size,
            growth,
            bias,
            max_size,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::Mesh(format!("region length must be > 0, got {}", self.length)));
        }
        if !(self.size > 0.0 && self.size.is_finite()) {
            return Err(Error::Mesh(format!("element size must be > 0, got {}", self.size)));
        }
        if !(self.growth >= 1.0 && self.growth.is_finite()) {
            return Err(Error::Mesh(format!("growth ratio must be >= 1, got {}", self.growth)));
        }
        if let Some(m) = self.max_size {
            if !(m >= self.size) {
                return Err(Error::Mesh(format!(
                    "max element size {m} is below the target size {}",
                    self.size
                )));
            }
        }
        Ok(())
    }

    /// Element sizes, ordered from the start of the region. They sum to
    /// `length`; every size is at most the target size times the growth
    /// sequence, so the fine end never exceeds `size`.
    pub fn sizes(&self) -> Result<Vec<f64>> {
        self.validate()?;
        if self.bias == Bias::Uniform || self.growth == 1.0 && self.max_size.is_none() {
            let n = ((self.length / self.size) - 1e-9).ceil().max(1.0) as usize;
            return Ok(vec![self.length / n as f64; n]);
        }
        let cap = self.max_size.unwrap_or(f64::INFINITY);
        let mut out = Vec::new();
        let mut total = 0.0;
        let mut h = self.size;
        while total < self.length * (1.0 - 1e-12) {
            let s = h.min(cap);
            out.push(s);
            total += s;
            h *= self.growth;
        }
        let scale = self.length / total;
        for s in &mut out {
            *s *= scale;
        }
        if self.bias == Bias::FineAtEnd {
            out.reverse();
        }
        Ok(out)
    }
}

/// Regions tiling one axis from 0 upward.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AxisGrading {
    pub regions: Vec<GradedRegion>,
}

impl AxisGrading {
    pub fn new(regions: Vec<GradedRegion>) -> Self {
        AxisGrading { regions }
    }

    pub fn uniform(extent: f64, cells: usize) -> Self {
        AxisGrading::new(vec![GradedRegion::uniform(extent, extent / cells.max(1) as f64)])
    }

    pub fn extent(&self) -> f64 {
        self.regions.iter().map(|r| r.length).sum()
    }

    /// Strictly increasing coordinates starting at 0. Region ends are placed
    /// exactly at the running sum of region lengths.
    pub fn coordinates(&self, extent: f64) -> Result<Vec<f64>> {
        if self.regions.is_empty() {
            return Err(Error::Mesh("axis grading has no regions".into()));
        }
        let total = self.extent();
        if (total - extent).abs() > 1e-9 * extent.abs().max(1.0) {
            return Err(Error::Mesh(format!(
                "grading regions do not tile the axis: they sum to {total} but the axis is {extent}"
            )));
        }
        let mut coords = vec![0.0];
        let mut start = 0.0;
        for region in &self.regions {
            let sizes = region.sizes()?;
            let mut x = start;
            for s in &sizes[..sizes.len() - 1] {
                x += s;
                coords.push(x);
            }
            start += region.length;
            coords.push(start);
        }
        let last = coords.len() - 1;
        coords[last] = extent;
        Ok(coords)
    }
}

/// Gradings of the three axes. `z` runs upward from the bottom of the model.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GradingSpec {
    pub x: AxisGrading,
    pub y: AxisGrading,
    pub z: AxisGrading,
}

/// Parameters that generate a pavement grading: fine near the joint and
/// along the wheel path, uniform through the overlay courses, coarsening
/// with depth.
#[derive(Debug, Clone, PartialEq)]
pub struct PavementGrading {
    /// Longitudinal size next to the joint.
    pub joint_size: f64,
    /// Extra uniform zone on each side of the gap at `joint_size`.
    pub joint_zone: f64,
    /// Transverse size inside the wheel-path band.
    pub path_size: f64,
    /// Half-width of the uniform wheel-path band.
    pub path_half_width: f64,
    /// Vertical size inside the overlay courses.
    pub course_size: f64,
    pub growth: f64,
    pub max_size_x: f64,
    pub max_size_y: f64,
    pub max_size_z: f64,
}

impl PavementGrading {
    pub fn desk() -> Self {
        PavementGrading {
            joint_size: 10.0,
            joint_zone: 0.0,
            path_size: 40.0,
            path_half_width: 120.0,
            course_size: 25.0,
            growth: 1.35,
            max_size_x: 160.0,
            max_size_y: 160.0,
            max_size_z: 700.0,
        }
    }

    pub fn paper() -> Self {
        PavementGrading {
            joint_size: 10.0,
            joint_zone: 20.0,
            path_size: 20.0,
            path_half_width: 120.0,
            course_size: 12.5,
            growth: 1.25,
            max_size_x: 100.0,
            max_size_y: 100.0,
            max_size_z: 500.0,
        }
    }

    /// Builds the three axis gradings. `layer_thicknesses` are top-down;
    /// `course_count` leading layers use the uniform course size.
    pub fn build(
        &self,
        length: f64,
        width: f64,
        joint_x: f64,
        gap: f64,
        wheel_y: f64,
        layer_thicknesses: &[f64],
        course_count: usize,
    ) -> Result<GradingSpec> {
        let g = self.growth;

        let gap_lo = joint_x - gap / 2.0;
        let gap_hi = joint_x + gap / 2.0;
        if !(gap > 0.0 && gap_lo - self.joint_zone > 0.0 && gap_hi + self.joint_zone < length) {
            return Err(Error::Mesh(format!(
                "joint gap [{gap_lo}, {gap_hi}] with zone {} does not fit inside the plan length {length}",
                self.joint_zone
            )));
        }
        let mut x = vec![GradedRegion::graded(
            gap_lo - self.joint_zone,
            self.joint_size,
            g,
            Bias::FineAtEnd,
            Some(self.max_size_x),
        )];
        if self.joint_zone > 0.0 {
            x.push(GradedRegion::uniform(self.joint_zone, self.joint_size));
        }
        x.push(GradedRegion::uniform(gap, self.joint_size.min(gap)));
        if self.joint_zone > 0.0 {
            x.push(GradedRegion::uniform(self.joint_zone, self.joint_size));
        }
        x.push(GradedRegion::graded(
            length - gap_hi - self.joint_zone,
            self.joint_size,
            g,
            Bias::FineAtStart,
            Some(self.max_size_x),
        ));

        let band_lo = (wheel_y - self.path_half_width).max(0.0);
        let band_hi = (wheel_y + self.path_half_width).min(width);
        let mut y = Vec::new();
        if band_lo > 0.0 {
            y.push(GradedRegion::graded(
                band_lo,
                self.path_size,
                g,
                Bias::FineAtEnd,
                Some(self.max_size_y),
            ));
        }
        y.push(GradedRegion::uniform(band_hi - band_lo, self.path_size));
        if band_hi < width {
            y.push(GradedRegion::graded(
                width - band_hi,
                self.path_size,
                g,
                Bias::FineAtStart,
                Some(self.max_size_y),
            ));
        }

        // z top-down first, then reversed into bottom-up order.
        let mut z_top_down = Vec::new();
        let mut last = self.course_size;
        for (i, &t) in layer_thicknesses.iter().enumerate() {
            if i < course_count {
                let region = GradedRegion::uniform(t, self.course_size);
                last = *region.sizes()?.last().expect("non-empty");
                z_top_down.push(region);
            } else {
                let start = (last * g).min(self.max_size_z).max(last);
                let region =
                    GradedRegion::graded(t, start, g, Bias::FineAtStart, Some(self.max_size_z.max(start)));
                last = *region.sizes()?.last().expect("non-empty");
                z_top_down.push(region);
            }
        }
        let z = z_top_down
            .into_iter()
            .rev()
            .map(|mut r| {
                r.bias = match r.bias {
                    Bias::FineAtStart => Bias::FineAtEnd,
                    Bias::FineAtEnd => Bias::FineAtStart,
                    Bias::Uniform => Bias::Uniform,
                };
                r
            })
            .collect();

        Ok(GradingSpec {
            x: AxisGrading::new(x),
            y: AxisGrading::new(y),
            z: AxisGrading::new(z),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn uniform_region() {
        let s = GradedRegion::uniform(100.0, 30.0).sizes().unwrap();
        assert_eq!(s.len(), 4);
        assert!(s.iter().all(|&h| (h - 25.0).abs() < 1e-12));
    }

    #[test]
    fn graded_region_sums_and_orders() {
        let r = GradedRegion::graded(500.0, 10.0, 1.3, Bias::FineAtEnd, Some(80.0));
        let s = r.sizes().unwrap();
        assert!((s.iter().sum::<f64>() - 500.0).abs() < 1e-9);
        assert!(s.last().unwrap() <= &10.0);
        assert!(s.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn rejects_bad_regions() {
        assert!(GradedRegion::uniform(0.0, 1.0).sizes().is_err());
        assert!(GradedRegion::uniform(1.0, 0.0).sizes().is_err());
        assert!(GradedRegion::graded(1.0, 1.0, 0.9, Bias::FineAtStart, None).sizes().is_err());
    }

    #[test]
    fn non_tiling_axis_is_rejected() {
        let axis = AxisGrading::new(vec![GradedRegion::uniform(10.0, 1.0)]);
        assert!(axis.coordinates(11.0).is_err());
        assert_eq!(axis.coordinates(10.0).unwrap().len(), 11);
    }

    proptest! {
        #[test]
        fn graded_axis_invariants(
            length in 1.0f64..5000.0,
            size in 0.5f64..200.0,
            growth in 1.0f64..2.0,
            fine_end in proptest::bool::ANY,
        ) {
            let bias = if fine_end { Bias::FineAtEnd } else { Bias::FineAtStart };
            let axis = AxisGrading::new(vec![GradedRegion::graded(length, size, growth, bias, None)]);
            let c = axis.coordinates(length).unwrap();
            prop_assert!(c.windows(2).all(|w| w[1] > w[0]));
            prop_assert_eq!(c[0], 0.0);
            prop_assert_eq!(*c.last().unwrap(), length);
            let h: Vec<f64> = c.windows(2).map(|w| w[1] - w[0]).collect();
            for w in h.windows(2) {
                let ratio = (w[1] / w[0]).max(w[0] / w[1]);
                prop_assert!(ratio <= growth * (1.0 + 1e-9), "ratio {} > {}", ratio, growth);
            }
        }
    }
}
