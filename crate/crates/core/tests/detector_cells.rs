use uhyp::detector::{detect, extract_form, search, Certificate, DetectMode, DetectOptions, DetectionCell};
use uhyp::pointsets::root_system;

fn unexpected(cells: &[DetectionCell]) -> Vec<(u32, u32, i64, i64)> {
    cells
        .iter()
        .filter(|c| c.unexpected)
        .map(|c| (c.d, c.m, c.edim, c.adim))
        .collect()
}

#[test]
fn single_cells() {
    let opts = DetectOptions::default();
    for (name, rank, d, m, edim, adim) in [("B", 3, 4, 3, 0, 1), ("D", 4, 3, 3, -2, 1), ("F", 4, 4, 4, -8, 1)] {
        let z = root_system(name, rank).unwrap();
        let c = detect(&z, d, m, DetectMode::Hybrid, &opts).unwrap();
        assert_eq!((c.edim, c.adim, c.unexpected), (edim, adim, true), "{name}{rank}");
        assert_eq!(c.certificate, Certificate::Certified);
    }
}

#[test]
fn a4_has_nothing() {
    let z = root_system("A", 4).unwrap();
    let cells = search(&z, (2, 6), (2, 6), DetectMode::Hybrid, &DetectOptions::default(), None).unwrap();
    assert_eq!(cells.len(), 15);
    assert!(unexpected(&cells).is_empty());
    assert!(cells.iter().all(|c| c.certificate == Certificate::Certified && c.adim >= c.edim));
}

#[test]
fn b4_grid() {
    let z = root_system("B", 4).unwrap();
    let cells = search(&z, (2, 6), (2, 6), DetectMode::Hybrid, &DetectOptions::default(), None).unwrap();
    assert_eq!(unexpected(&cells), vec![(4, 4, -1, 1)]);
    let order: Vec<(u32, u32)> = cells.iter().map(|c| (c.d, c.m)).collect();
    let mut sorted = order.clone();
    sorted.sort();
    assert_eq!(order, sorted);
}

#[test]
fn h3_grid() {
    let z = root_system("H", 3).unwrap();
    let cells = search(&z, (2, 8), (2, 8), DetectMode::Hybrid, &DetectOptions::default(), None).unwrap();
    assert_eq!(unexpected(&cells), vec![(6, 5, -2, 1), (7, 6, 0, 2), (8, 7, 2, 3)]);
}

#[test]
fn empty_m_range() {
    let z = root_system("B", 3).unwrap();
    let cells = search(&z, (2, 6), (7, 6), DetectMode::Hybrid, &DetectOptions::default(), None).unwrap();
    assert!(cells.is_empty());
}

#[test]
fn forms() {
    let opts = DetectOptions::default();
    let b4 = root_system("B", 4).unwrap();
    let f = extract_form(&b4, 4, 4, 1, &opts).unwrap();
    assert_eq!(f[0].bidegree, (4, 4));
    let d4 = root_system("D", 4).unwrap();
    let f = extract_form(&d4, 3, 3, 1, &opts).unwrap();
    assert_eq!(f[0].bidegree, (3, 3));
    let h3 = root_system("H", 3).unwrap();
    let f = extract_form(&h3, 7, 6, 2, &opts).unwrap();
    assert_eq!(f.len(), 2);
    assert!(f.iter().all(|g| g.bidegree.1 == 7 && g.bidegree.0 >= 6));
}

#[test]
fn modes_agree_on_small_cells() {
    let z = root_system("D", 4).unwrap();
    for (d, m) in [(3, 2), (3, 3), (4, 3), (4, 4)] {
        let cells: Vec<DetectionCell> = [DetectMode::Symbolic, DetectMode::Hybrid, DetectMode::Probabilistic]
            .into_iter()
            .map(|mode| detect(&z, d, m, mode, &DetectOptions::default()).unwrap())
            .collect();
        for c in &cells[1..] {
            assert_eq!((c.edim, c.adim, c.unexpected), (cells[0].edim, cells[0].adim, cells[0].unexpected));
        }
    }
}
