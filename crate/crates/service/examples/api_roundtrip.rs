//! Drives the HTTP API in-process: upload a CSV, rank linear relationships,
//! then ask for the chart of the strongest one.
//!
//! `cargo run -p insight-service --example api_roundtrip`

use axum::body::Body;
use axum::http::{Method, Request};
use http_body_util::BodyExt;
use insight_service::{router, AppState};
use serde_json::{json, Value};
use tower::ServiceExt;

async fn send(app: &axum::Router, method: Method, uri: &str, body: String) -> Value {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .body(Body::from(body))
        .unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    println!("{uri} -> {}", res.status());
    serde_json::from_slice(&res.into_body().collect().await.unwrap().to_bytes()).unwrap()
}

#[tokio::main]
async fn main() {
    let app = router(AppState::new(Default::default()));
    let mut csv = String::from("hours,leisure,income,region\n");
    for i in 0..40 {
        let h = 30.0 + (i * 7 % 30) as f64;
        csv += &format!(
            "{h},{},{},{}\n",
            24.0 - h / 5.0 + (i % 3) as f64 * 0.2,
            1000 * (i % 11),
            ["n", "s", "e"][i % 3]
        );
    }
    let ds = send(&app, Method::POST, "/v1/datasets?name=demo", csv).await;
    let id = ds["id"].as_str().unwrap();

    let q = json!({ "class_id": "linear_relationship", "limit": 3 });
    let ranked = send(
        &app,
        Method::POST,
        &format!("/v1/datasets/{id}/query"),
        q.to_string(),
    )
    .await;
    for d in ranked["insights"].as_array().unwrap() {
        println!("  {} {:.3}", d["tuple"], d["value"].as_f64().unwrap());
    }
    let viz = json!({ "insight": ranked["insights"][0] });
    let chart = send(
        &app,
        Method::POST,
        &format!("/v1/datasets/{id}/visualize"),
        viz.to_string(),
    )
    .await;
    let v = &chart["visualization"];
    println!(
        "  {} points, slope {}, intercept {}",
        v["points"].as_array().unwrap().len(),
        v["slope"],
        v["intercept"]
    );
}
