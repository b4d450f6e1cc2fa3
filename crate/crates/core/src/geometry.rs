//! Coordinate axes, border index sets and rectangle enumeration.
//!
//! Sub-regions are closed axis-aligned rectangles whose borders sit on
//! photo coordinates. Borders are stored as indices into the sorted distinct
//! longitudes (`C`) and latitudes (`L`).

use std::collections::HashMap;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{GeoPoint, Photo};
use crate::par::{self, Execution};

/// Sorted distinct photo longitudes and latitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateAxes {
    pub lngs: Vec<f64>,
    pub lats: Vec<f64>,
}

impl CoordinateAxes {
    pub fn build(photos: &[Photo]) -> Result<Self> {
        if photos.is_empty() {
            return Err(Error::Geometry("no photos".into()));
        }
        let dedup = |mut v: Vec<f64>| {
            v.sort_by(f64::total_cmp);
            v.dedup();
            v
        };
        Ok(CoordinateAxes {
            lngs: dedup(photos.iter().map(|p| p.location.lng).collect()),
            lats: dedup(photos.iter().map(|p| p.location.lat).collect()),
        })
    }

    pub fn lng_index(&self, lng: f64) -> Result<usize> {
        self.lngs
            .binary_search_by(|x| x.total_cmp(&lng))
            .map_err(|_| Error::Geometry(format!("longitude {lng} is not on the axis")))
    }

    pub fn lat_index(&self, lat: f64) -> Result<usize> {
        self.lats
            .binary_search_by(|x| x.total_cmp(&lat))
            .map_err(|_| Error::Geometry(format!("latitude {lat} is not on the axis")))
    }

    /// `(lng index, lat index)` of a point lying on the axes.
    pub fn position(&self, p: &GeoPoint) -> Result<(usize, usize)> {
        Ok((self.lng_index(p.lng)?, self.lat_index(p.lat)?))
    }

    /// Number of ordered boundaries, `|C|(|C|+1)/2 * |L|(|L|+1)/2`.
    pub fn ordered_boundary_count(&self) -> usize {
        let (c, l) = (self.lngs.len(), self.lats.len());
        c * (c + 1) / 2 * (l * (l + 1) / 2)
    }
}

/// Left/right borders index `C`, bottom/top borders index `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Boundary {
    pub left: usize,
    pub right: usize,
    pub bottom: usize,
    pub top: usize,
}

impl Boundary {
    pub fn is_ordered(&self) -> bool {
        self.left <= self.right && self.bottom <= self.top
    }

    pub fn contains(&self, (c, l): (usize, usize)) -> bool {
        self.left <= c && c <= self.right && self.bottom <= l && l <= self.top
    }
}

/// Index ranges into `C` and `L` admissible as borders of a region holding a photo.
///
/// `left` = `{c : lng_c <= lng_p}`, `right` = `{c : lng_c >= lng_p}` and
/// likewise `bottom`/`top` on latitudes; the comparisons are inclusive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BorderSets {
    pub left: Range<usize>,
    pub right: Range<usize>,
    pub bottom: Range<usize>,
    pub top: Range<usize>,
}

pub fn border_index_sets(photo: &Photo, axes: &CoordinateAxes) -> Result<BorderSets> {
    let (c, l) = axes.position(&photo.location)?;
    Ok(BorderSets {
        left: 0..c + 1,
        right: c..axes.lngs.len(),
        bottom: 0..l + 1,
        top: l..axes.lats.len(),
    })
}

/// Indices of the photos inside the closed rectangle `b`, ascending.
pub fn photos_in_rectangle(b: &Boundary, photos: &[Photo], axes: &CoordinateAxes) -> Result<Vec<usize>> {
    if !b.is_ordered() {
        return Err(Error::Geometry(format!("unordered boundary {b:?}")));
    }
    if b.right >= axes.lngs.len() || b.top >= axes.lats.len() {
        return Err(Error::Geometry(format!("boundary {b:?} outside the axes")));
    }
    let (lo_x, hi_x) = (axes.lngs[b.left], axes.lngs[b.right]);
    let (lo_y, hi_y) = (axes.lats[b.bottom], axes.lats[b.top]);
    Ok(photos
        .iter()
        .enumerate()
        .filter(|(_, p)| {
            let (x, y) = (p.location.lng, p.location.lat);
            lo_x <= x && x <= hi_x && lo_y <= y && y <= hi_y
        })
        .map(|(i, _)| i)
        .collect())
}

/// Tightest boundary around a non-empty set of photo indices.
pub fn bounding_boundary(members: &[usize], photos: &[Photo], axes: &CoordinateAxes) -> Result<Boundary> {
    let first = *members.first().ok_or_else(|| Error::Geometry("empty photo set".into()))?;
    let (c0, l0) = axes.position(&photos[first].location)?;
    let mut b = Boundary { left: c0, right: c0, bottom: l0, top: l0 };
    for &k in &members[1..] {
        let (c, l) = axes.position(&photos[k].location)?;
        b.left = b.left.min(c);
        b.right = b.right.max(c);
        b.bottom = b.bottom.min(l);
        b.top = b.top.max(l);
    }
    Ok(b)
}

/// True iff every photo inside the bounding rectangle of `set` belongs to `set`.
pub fn is_spatial_convex(set: &[usize], photos: &[Photo]) -> Result<bool> {
    if set.is_empty() {
        return Err(Error::Geometry("spatial convexity of an empty set".into()));
    }
    let axes = CoordinateAxes::build(photos)?;
    let b = bounding_boundary(set, photos, &axes)?;
    let inside = photos_in_rectangle(&b, photos, &axes)?;
    let mut members = set.to_vec();
    members.sort_unstable();
    members.dedup();
    Ok(inside == members)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rectangle {
    pub boundary: Boundary,
    /// Photo indices inside the boundary, ascending.
    pub members: Vec<usize>,
}

/// Enumerates every ordered boundary `(left <= right, bottom <= top)` with its
/// member set.
///
/// With `dedup`, empty member sets are dropped and each distinct member set is
/// kept once with its tightest boundary, in order of first appearance.
pub fn enumerate_rectangles(photos: &[Photo], axes: &CoordinateAxes, dedup: bool) -> Result<Vec<Rectangle>> {
    enumerate_rectangles_with(photos, axes, dedup, Execution::default())
}

pub fn enumerate_rectangles_with(
    photos: &[Photo],
    axes: &CoordinateAxes,
    dedup: bool,
    exec: Execution,
) -> Result<Vec<Rectangle>> {
    if photos.is_empty() {
        return Err(Error::Geometry("no photos".into()));
    }
    let positions: Vec<(usize, usize)> =
        photos.iter().map(|p| axes.position(&p.location)).collect::<Result<_>>()?;
    let (nc, nl) = (axes.lngs.len(), axes.lats.len());
    let per_left = par::map_range(exec, nc, |left| {
        let mut out = Vec::new();
        for right in left..nc {
            for bottom in 0..nl {
                for top in bottom..nl {
                    let boundary = Boundary { left, right, bottom, top };
                    let members = (0..positions.len()).filter(|&k| boundary.contains(positions[k])).collect();
                    out.push(Rectangle { boundary, members });
                }
            }
        }
        out
    });
    let all = per_left.into_iter().flatten();
    if !dedup {
        return Ok(all.collect());
    }
    let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut out: Vec<Rectangle> = Vec::new();
    for rect in all {
        if rect.members.is_empty() || seen.contains_key(&rect.members) {
            continue;
        }
        let boundary = bounding_boundary(&rect.members, photos, axes)?;
        seen.insert(rect.members.clone(), out.len());
        out.push(Rectangle { boundary, members: rect.members });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::t4;
    use crate::instance::{generate_grid_instance, GridSpec};

    fn photo_at(id: &str, lng: f64, lat: f64) -> Photo {
        Photo {
            id: id.into(),
            location: GeoPoint { lng, lat },
            lambda: 1.0,
            mu: 1.0,
            stored_on: "d1".into(),
        }
    }

    fn grid(rows: usize, cols: usize) -> Vec<Photo> {
        generate_grid_instance(&GridSpec { rows, cols, ..GridSpec::default() }).unwrap().photos
    }

    #[test]
    fn axes() {
        let a = CoordinateAxes::build(&t4().photos).unwrap();
        assert_eq!((a.lngs.clone(), a.lats.clone()), (vec![0.0, 1.0], vec![0.0, 1.0]));
        let line: Vec<Photo> = (0..3).map(|i| photo_at("p", 0.0, i as f64)).collect();
        assert_eq!(CoordinateAxes::build(&line).unwrap().lngs.len(), 1);
        let a = CoordinateAxes::build(&grid(20, 10)).unwrap();
        assert_eq!((a.lngs.len(), a.lats.len()), (10, 20));
    }

    #[test]
    fn border_sets_are_inclusive() {
        let photos = vec![photo_at("a", 0.0, 0.0), photo_at("b", 1.0, 0.0)];
        let axes = CoordinateAxes::build(&photos).unwrap();
        let s = border_index_sets(&photos[1], &axes).unwrap();
        assert_eq!((s.left, s.right), (0..2, 1..2));

        let single = vec![photo_at("a", 3.0, 3.0)];
        let axes = CoordinateAxes::build(&single).unwrap();
        let s = border_index_sets(&single[0], &axes).unwrap();
        assert_eq!((s.left, s.right), (0..1, 0..1));

        let three: Vec<Photo> = (0..3).map(|i| photo_at("p", i as f64, 0.0)).collect();
        let axes = CoordinateAxes::build(&three).unwrap();
        let s = border_index_sets(&three[1], &axes).unwrap();
        assert_eq!((s.left, s.right), (0..2, 1..3));
    }

    #[test]
    fn rectangle_membership() {
        let inst = t4();
        let axes = CoordinateAxes::build(&inst.photos).unwrap();
        let left_col = Boundary { left: 0, right: 0, bottom: 0, top: 1 };
        assert_eq!(photos_in_rectangle(&left_col, &inst.photos, &axes).unwrap(), vec![0, 1]);
        let full = Boundary { left: 0, right: 1, bottom: 0, top: 1 };
        assert_eq!(photos_in_rectangle(&full, &inst.photos, &axes).unwrap(), vec![0, 1, 2, 3]);
        let point = Boundary { left: 1, right: 1, bottom: 1, top: 1 };
        assert_eq!(photos_in_rectangle(&point, &inst.photos, &axes).unwrap(), vec![3]);
        let reversed = Boundary { left: 1, right: 0, bottom: 0, top: 1 };
        assert!(photos_in_rectangle(&reversed, &inst.photos, &axes).is_err());
    }

    #[test]
    fn four_corners_are_not_spatial_convex() {
        let photos = grid(4, 4);
        let corners: Vec<usize> = photos
            .iter()
            .enumerate()
            .filter(|(_, p)| (p.location.lng == 0.0 || p.location.lng == 3.0) && (p.location.lat == 0.0 || p.location.lat == 3.0))
            .map(|(i, _)| i)
            .collect();
        assert_eq!(corners.len(), 4);
        assert!(!is_spatial_convex(&corners, &photos).unwrap());

        let block: Vec<usize> = photos
            .iter()
            .enumerate()
            .filter(|(_, p)| (1.0..=2.0).contains(&p.location.lng) && (1.0..=2.0).contains(&p.location.lat))
            .map(|(i, _)| i)
            .collect();
        assert!(is_spatial_convex(&block, &photos).unwrap());
        assert!(is_spatial_convex(&[5], &photos).unwrap());
        assert!(is_spatial_convex(&[], &photos).is_err());
    }

    #[test]
    fn enumeration_counts() {
        let photos = t4().photos;
        let axes = CoordinateAxes::build(&photos).unwrap();
        assert_eq!(enumerate_rectangles(&photos, &axes, false).unwrap().len(), 9);
        let distinct = enumerate_rectangles(&photos, &axes, true).unwrap();
        assert_eq!(distinct.len(), 9);
        let sizes = |n: usize| distinct.iter().filter(|r| r.members.len() == n).count();
        assert_eq!((sizes(1), sizes(2), sizes(4)), (4, 4, 1));

        let one = vec![photo_at("a", 0.0, 0.0)];
        let axes = CoordinateAxes::build(&one).unwrap();
        assert_eq!(enumerate_rectangles(&one, &axes, true).unwrap().len(), 1);
    }

    #[test]
    fn dedup_keeps_tight_boundaries() {
        // a sparse layout: some boundaries are empty or share member sets
        let photos = vec![photo_at("a", 0.0, 0.0), photo_at("b", 2.0, 2.0), photo_at("c", 1.0, 3.0)];
        let axes = CoordinateAxes::build(&photos).unwrap();
        let rects = enumerate_rectangles(&photos, &axes, true).unwrap();
        for r in &rects {
            assert_eq!(r.boundary, bounding_boundary(&r.members, &photos, &axes).unwrap());
            assert_eq!(photos_in_rectangle(&r.boundary, &photos, &axes).unwrap(), r.members);
        }
        let mut sets: Vec<_> = rects.iter().map(|r| r.members.clone()).collect();
        sets.sort();
        sets.dedup();
        assert_eq!(sets.len(), rects.len());
    }
}
