use noidkit::base::{BasePoint, BaseSurface};
use noidkit::contours::{knoid_contour, Contour, KnoidSpec};
use noidkit::io::{format_float, graph_mesh, patch_mesh, MeshFormat, SurfaceMesh, Table};
use noidkit::mesh::triangulate;
use noidkit::polygon::BasePolygon;
use noidkit::reference::helicoid_patch;
use noidkit::solver::DiscreteGraph;
use noidkit::{Error, ModelPoint, SpaceParams};
use proptest::prelude::*;
use std::collections::HashMap;
use std::path::PathBuf;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("noidkit-io-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn square_graph() -> DiscreteGraph {
    let v = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)].map(|(x, y)| BasePoint::new(x, y));
    let poly = BasePolygon::from_vertices(BaseSurface::flat(1.0), v.to_vec()).unwrap();
    let mesh = triangulate(&poly, 0.5).unwrap();
    let heights = mesh.points.iter().map(|q| q.x).collect();
    DiscreteGraph { space: SpaceParams::new(0.0, 0.0).unwrap(), mesh, heights }
}

fn consistently_oriented(mesh: &SurfaceMesh) -> bool {
    let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
    for f in &mesh.faces {
        for k in 0..3 {
            *edges.entry((f[k], f[(k + 1) % 3])).or_default() += 1;
        }
    }
    edges.values().all(|&c| c == 1)
}

#[test]
fn unit_square_graph_exports_to_obj() {
    let g = graph_mesh(&square_graph());
    assert!(g.vertices.len() >= 4);
    assert!(consistently_oriented(&g));
    for f in &g.faces {
        let [a, b, c] = f.map(|i| g.vertices[i]);
        let cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
        assert!(cross > 0.0);
    }
    let obj = g.to_obj().unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), g.vertices.len());
    assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), g.faces.len());
    let back = SurfaceMesh::from_obj(&obj).unwrap();
    assert_eq!(back, g);
    assert_eq!(back.to_obj().unwrap(), obj);
}

#[test]
fn file_round_trips() {
    let dir = scratch("files");
    let g = graph_mesh(&square_graph());
    for format in [MeshFormat::Obj, MeshFormat::Ply] {
        let path = dir.join(format!("square.{}", format.extension()));
        g.write(&path, format).unwrap();
        let back = SurfaceMesh::read(&path).unwrap();
        assert_eq!(back, g);
    }
    assert!(matches!(SurfaceMesh::read(&dir.join("missing.obj")), Err(Error::Io(_))));
    assert!(matches!(SurfaceMesh::read(&dir.join("square.stl")), Err(Error::Invalid(_))));
}

#[test]
fn helicoid_grid_counts() {
    let space = SpaceParams::new(-1.0, 0.3).unwrap();
    let heli = helicoid_patch(&space, ModelPoint::new(0.1, 1.0, 0.0), 0.4, 0.8, 0.5, 1.0).unwrap();
    let m = patch_mesh(&heli, 50, 50).unwrap();
    assert_eq!(m.vertices.len(), 2500);
    assert_eq!(m.faces.len(), 4802);
    assert!(consistently_oriented(&m));
    let ply = m.to_ply().unwrap();
    assert_eq!(SurfaceMesh::from_ply(&ply).unwrap(), m);
    assert!(patch_mesh(&heli, 1, 50).is_err());
}

#[test]
fn obj_reader_accepts_slashed_faces_and_rejects_bad_indices() {
    let text = "# tri\nv 0 0 0\nv 1 0 0\nv 0 1 0\nvn 0 0 1\nf 1//1 2//1 3//1\n";
    let m = SurfaceMesh::from_obj(text).unwrap();
    assert_eq!(m.faces, vec![[0, 1, 2]]);
    assert!(SurfaceMesh::from_obj("v 0 0 0\nf 1 2 3\n").is_err());
    assert!(SurfaceMesh::from_obj("v 0 0\n").is_err());
    assert!(SurfaceMesh::from_ply("ply\nformat binary_little_endian 1.0\nend_header\n").is_err());
}

#[test]
fn csv_tables() {
    let mut t = Table::new(["s", "u"]);
    t.push(vec![0.0, 0.0]).unwrap();
    t.push(vec![std::f64::consts::FRAC_PI_4, 0.881_373_587_019_543]).unwrap();
    assert!(t.push(vec![1.0]).is_err());
    let text = t.to_csv().unwrap();
    assert!(text.starts_with("s,u\n"));
    assert_eq!(Table::from_csv(&text).unwrap(), t);
    assert_eq!(t.column("u").unwrap()[1], 0.881_373_587_019_543);
    assert!(t.column("w").is_none());
}

#[test]
fn contour_text_round_trip() {
    let spec = KnoidSpec { space: SpaceParams::new(-1.0, 0.3).unwrap(), k: 3, a: 1.0, r: 2.0 };
    let c = knoid_contour(&spec).unwrap().contour;
    let back = Contour::from_text(&c.to_text()).unwrap();
    assert_eq!(back.vertices(), c.vertices());
}

proptest! {
    #[test]
    fn float_text_round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
        let s = format_float(x);
        prop_assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
        let digits = s.split('e').next().unwrap().chars().filter(|c| c.is_ascii_digit()).count();
        prop_assert_eq!(digits, 17);
    }
}
