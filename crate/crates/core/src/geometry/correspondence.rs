use nalgebra::Point2;

use super::mesh::BoundaryLocation;
use super::polygon::Polygon;
use super::GeometryError;

/// Vertex pairing between two polygons with matching loop structure.
///
/// Source vertex `k` of loop `l` goes to target vertex `(k + offset[l]) mod n_l`;
/// each source edge maps onto the paired target edge proportionally to arclength.
#[derive(Debug, Clone)]
pub struct BoundaryCorrespondence {
    source: Polygon,
    target: Polygon,
    offsets: Vec<usize>,
}

/// Identity pairing `v_i -> w_i`.
pub fn boundary_correspondence(source: &Polygon, target: &Polygon) -> Result<BoundaryCorrespondence, GeometryError> {
    BoundaryCorrespondence::with_offsets(source, target, &vec![0; source.loop_count()])
}

impl BoundaryCorrespondence {
    /// Pairing rotated by `offset` on the outer loop, identity on holes.
    pub fn with_offset(source: &Polygon, target: &Polygon, offset: usize) -> Result<Self, GeometryError> {
        let mut offsets = vec![0; source.loop_count()];
        offsets[0] = offset;
        Self::with_offsets(source, target, &offsets)
    }

    pub fn with_offsets(source: &Polygon, target: &Polygon, offsets: &[usize]) -> Result<Self, GeometryError> {
        if source.loop_count() != target.loop_count() {
            return Err(GeometryError::CountMismatch {
                loop_index: source.loop_count().min(target.loop_count()),
                source_count: source.loop_count(),
                target_count: target.loop_count(),
            });
        }
        for li in 0..source.loop_count() {
            let (ns, nt) = (source.loop_points(li).len(), target.loop_points(li).len());
            if ns != nt {
                return Err(GeometryError::CountMismatch {
                    loop_index: li,
                    source_count: ns,
                    target_count: nt,
                });
            }
        }
        assert_eq!(offsets.len(), source.loop_count(), "one offset per loop");
        let offsets = offsets
            .iter()
            .enumerate()
            .map(|(li, &o)| o % source.loop_points(li).len())
            .collect();
        Ok(BoundaryCorrespondence {
            source: source.clone(),
            target: target.clone(),
            offsets,
        })
    }

    pub fn source(&self) -> &Polygon {
        &self.source
    }

    pub fn target(&self) -> &Polygon {
        &self.target
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// Target vertex index (within the loop) paired with source vertex `k`.
    pub fn paired_vertex(&self, loop_index: usize, k: usize) -> usize {
        (k + self.offsets[loop_index]) % self.source.loop_points(loop_index).len()
    }

    /// Target points `w_i` in the source's global vertex order.
    pub fn targets(&self) -> Vec<Point2<f64>> {
        (0..self.source.loop_count())
            .flat_map(|li| {
                let n = self.source.loop_points(li).len();
                (0..n).map(move |k| self.target.loop_points(li)[self.paired_vertex(li, k)])
            })
            .collect()
    }

    /// Image of a boundary location under the affine edge maps.
    pub fn map_boundary(&self, loc: &BoundaryLocation) -> Point2<f64> {
        match *loc {
            BoundaryLocation::Vertex { loop_index, vertex } => {
                self.target.loop_points(loop_index)[self.paired_vertex(loop_index, vertex)]
            }
            BoundaryLocation::Edge { loop_index, edge, t } => {
                let (a, b) = self.target.edge(loop_index, self.paired_vertex(loop_index, edge));
                a + (b - a) * t
            }
        }
    }
}
