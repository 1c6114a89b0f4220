//! Browser bindings for the simulator. Every export takes primitives and
//! returns a JSON string; failures come back as `{"error": "..."}`.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use rre_core::algorithms::{self, AlgorithmId};
use rre_core::metrics;
use rre_core::netfile;
use rre_core::scenario::{self, ScenarioConfig};
use rre_core::{fixtures, ExecutionOrder, RfidNetwork};

#[derive(Debug, Serialize)]
pub struct ReaderView {
    pub id: usize,
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub radius: Option<f64>,
    pub covered: Vec<usize>,
}

#[derive(Debug, Serialize)]
pub struct TagView {
    pub id: usize,
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub multiplicity: usize,
}

#[derive(Debug, Serialize)]
pub struct AlgorithmView {
    pub algorithm: &'static str,
    pub redundant: Vec<usize>,
    pub writes: u64,
    pub coverage_preserved: bool,
    pub uncovered: Vec<usize>,
}

#[derive(Debug, Serialize)]
pub struct DeploymentView {
    pub area: f64,
    pub readers: Vec<ReaderView>,
    pub tags: Vec<TagView>,
    pub order: Vec<usize>,
    pub results: Vec<AlgorithmView>,
}

#[derive(Debug, Serialize)]
pub struct OrderRow {
    pub order: Vec<usize>,
    /// One detected set per entry of `algorithms`.
    pub detected: Vec<Vec<usize>>,
}

#[derive(Debug, Serialize)]
pub struct OrderTable {
    pub network: String,
    pub optimal: usize,
    pub algorithms: Vec<&'static str>,
    pub pod: Vec<f64>,
    pub prd: Vec<f64>,
    pub rows: Vec<OrderRow>,
}

fn run_all(net: &RfidNetwork, order: &ExecutionOrder) -> Result<Vec<AlgorithmView>, String> {
    AlgorithmId::ALL
        .iter()
        .map(|&alg| {
            let r = algorithms::run(alg, net, order).map_err(|e| e.to_string())?;
            let verdict = metrics::verify_coverage(net, &r.redundant).map_err(|e| e.to_string())?;
            Ok(AlgorithmView {
                algorithm: alg.as_str(),
                redundant: r.redundant.into_iter().collect(),
                writes: r.writes_total,
                coverage_preserved: verdict.preserved,
                uncovered: verdict.uncovered.into_iter().collect(),
            })
        })
        .collect()
}

fn view(net: &RfidNetwork, area: f64, order: &ExecutionOrder) -> Result<DeploymentView, String> {
    let readers = net
        .readers()
        .iter()
        .map(|r| ReaderView {
            id: r.id,
            x: r.position.map(|p| p.x),
            y: r.position.map(|p| p.y),
            radius: r.radius,
            covered: net.covered(r.id).to_vec(),
        })
        .collect();
    let tags = net
        .tags()
        .iter()
        .map(|t| TagView {
            id: t.id,
            x: t.position.map(|p| p.x),
            y: t.position.map(|p| p.y),
            multiplicity: net.multiplicity(t.id).unwrap_or(0),
        })
        .collect();
    Ok(DeploymentView {
        area,
        readers,
        tags,
        order: order.as_slice().to_vec(),
        results: run_all(net, order)?,
    })
}

/// Generates a seeded deployment and runs every scheme on one random order.
pub fn deploy_view(
    readers: usize,
    tags: usize,
    radius: f64,
    area: f64,
    seed: u64,
) -> Result<DeploymentView, String> {
    let config = ScenarioConfig {
        area_side: area,
        reader_count: readers,
        tag_count: tags,
        radius,
        seed,
    };
    let (net, order) = scenario::generate_trial(&config).map_err(|e| e.to_string())?;
    view(&net, area, &order)
}

/// Parses a network file and runs every scheme on the given order
/// (ascending when `order` is blank).
pub fn network_view(text: &str, order: &str) -> Result<DeploymentView, String> {
    let net = netfile::parse(text).map_err(|e| e.to_string())?.network;
    let m = net.reader_count();
    let order = if order.trim().is_empty() {
        ExecutionOrder::ascending(m)
    } else {
        ExecutionOrder::parse(order, m).map_err(|e| e.to_string())?
    };
    let area = net
        .readers()
        .iter()
        .filter_map(|r| Some(r.position?.x.max(r.position?.y) + r.radius?))
        .chain(net.tags().iter().filter_map(|t| Some(t.position?.x.max(t.position?.y))))
        .fold(0.0, f64::max);
    view(&net, area, &order)
}

/// Detected set per execution order for a built-in fixture, with POD and PRD.
pub fn order_table_view(name: &str) -> Result<OrderTable, String> {
    let net = fixtures::by_name(name).ok_or_else(|| {
        format!("unknown fixture '{name}' (known: {})", fixtures::NAMES.join(", "))
    })?;
    let algs = AlgorithmId::ALL;
    let mut pod = Vec::new();
    let mut prd = Vec::new();
    let mut columns = Vec::new();
    let mut optimal = 0;
    for alg in algs {
        let report = metrics::metrics(&net, alg).map_err(|e| e.to_string())?;
        optimal = report.optimal;
        pod.push(report.pod);
        prd.push(report.prd);
        columns.push(metrics::evaluate_orders(&net, alg).map_err(|e| e.to_string())?);
    }
    let rows = (0..columns[0].len())
        .map(|i| OrderRow {
            order: columns[0][i].order.as_slice().to_vec(),
            detected: columns
                .iter()
                .map(|c| c[i].detected.iter().copied().collect())
                .collect(),
        })
        .collect();
    Ok(OrderTable {
        network: name.to_string(),
        optimal,
        algorithms: algs.iter().map(|a| a.as_str()).collect(),
        pod,
        prd,
        rows,
    })
}

fn to_json<T: Serialize>(r: Result<T, String>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v).expect("serializable view"),
        Err(e) => serde_json::json!({ "error": e }).to_string(),
    }
}

#[wasm_bindgen]
pub fn deploy(readers: usize, tags: usize, radius: f64, area: f64, seed: u32) -> String {
    to_json(deploy_view(readers, tags, radius, area, seed as u64))
}

#[wasm_bindgen]
pub fn run_network(text: &str, order: &str) -> String {
    to_json(network_view(text, order))
}

#[wasm_bindgen]
pub fn order_table(name: &str) -> String {
    to_json(order_table_view(name))
}

#[wasm_bindgen]
pub fn fixture_text(name: &str) -> String {
    fixtures::by_name(name)
        .map(|net| netfile::to_text(&net, &[format!("fixture {name}")]))
        .unwrap_or_default()
}
