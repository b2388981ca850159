use std::time::Duration;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use insight_core::EngineConfig;
use insight_service::{router, AppState, API_VERSION};
use serde_json::{json, Value};
use tower::ServiceExt;

const BETTER_LIFE: &str = "\
Country,WorkingLongHours,TimeDevotedToLeisure,Income,LifeExpectancy,Region
A,12.1,14.2,21000,78.1,north
B,3.5,16.1,33000,81.2,south
C,20.3,13.0,15000,74.9,north
D,8.8,15.0,28000,80.4,east
E,1.2,16.5,40000,82.6,south
F,15.6,13.9,18000,76.0,north
G,6.4,15.4,30000,80.1,east
H,25.0,12.2,12000,72.3,north
I,10.0,14.8,24000,79.0,south
J,4.1,15.9,36000,81.8,east
";

fn app() -> Router {
    router(AppState::new(EngineConfig::default()))
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let (status, bytes) =
        call_raw(app, method, uri, body.map(|b| b.to_string().into_bytes())).await;
    (
        status,
        serde_json::from_slice(&bytes).expect("json response"),
    )
}

async fn call_raw(
    app: &Router,
    method: Method,
    uri: &str,
    body: Option<Vec<u8>>,
) -> (StatusCode, Vec<u8>) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map(Body::from).unwrap_or_else(Body::empty))
        .unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    (
        status,
        res.into_body().collect().await.unwrap().to_bytes().to_vec(),
    )
}

async fn upload(app: &Router, csv: &str) -> String {
    let req = Request::builder()
        .method(Method::POST)
        .uri("/v1/datasets?name=better_life")
        .header("content-type", "text/csv")
        .body(Body::from(csv.to_string()))
        .unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    assert_eq!(res.status(), StatusCode::CREATED);
    let v: Value =
        serde_json::from_slice(&res.into_body().collect().await.unwrap().to_bytes()).unwrap();
    v["id"].as_str().unwrap().to_string()
}

async fn wait_precompute(app: &Router, id: &str) -> Value {
    for _ in 0..500 {
        let (status, v) = call(
            app,
            Method::GET,
            &format!("/v1/datasets/{id}/precompute"),
            None,
        )
        .await;
        assert_eq!(status, StatusCode::OK);
        if v["state"] != "running" {
            return v;
        }
        tokio::time::sleep(Duration::from_millis(10)).await;
    }
    panic!("precompute did not finish");
}

#[tokio::test]
async fn tiny_upload_completes_precompute() {
    let app = app();
    let id = upload(&app, "x,y\n1,2\n2,4\n3,7\n").await;
    let p = wait_precompute(&app, &id).await;
    assert_eq!(p["state"], "completed");
    assert_eq!(p["done"], p["total"]);
    assert_eq!(p["api_version"], API_VERSION);

    let (status, info) = call(&app, Method::GET, &format!("/v1/datasets/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(info["n_rows"], 3);
    assert_eq!(info["columns"][1]["kind"], "numeric");
    let (_, list) = call(&app, Method::GET, "/v1/datasets", None).await;
    assert_eq!(list["datasets"].as_array().unwrap().len(), 1);
}

#[tokio::test]
async fn range_query_stays_inside_interval() {
    let app = app();
    let id = upload(&app, BETTER_LIFE).await;
    let q = json!({ "class_id": "linear_relationship", "metric_range": { "lo": 0.5, "hi": 0.8 }, "limit": 50 });
    let (status, v) = call(
        &app,
        Method::POST,
        &format!("/v1/datasets/{id}/query"),
        Some(q),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    for d in v["insights"].as_array().unwrap() {
        let r = d["value"].as_f64().unwrap();
        assert!((0.5..=0.8).contains(&r), "{r}");
    }
    let (_, all) = call(
        &app,
        Method::POST,
        &format!("/v1/datasets/{id}/query"),
        Some(json!({ "class_id": "linear_relationship", "limit": 50 })),
    )
    .await;
    let inside = all["insights"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|d| (0.5..=0.8).contains(&d["value"].as_f64().unwrap()))
        .count();
    assert_eq!(v["insights"].as_array().unwrap().len(), inside);
}

#[tokio::test]
async fn scatter_carries_fit_line() {
    let app = app();
    let id = upload(&app, BETTER_LIFE).await;
    let (_, v) = call(
        &app,
        Method::POST,
        &format!("/v1/datasets/{id}/query"),
        Some(json!({ "class_id": "linear_relationship", "limit": 1 })),
    )
    .await;
    let top = v["insights"][0].clone();
    let (status, viz) = call(
        &app,
        Method::POST,
        &format!("/v1/datasets/{id}/visualize"),
        Some(json!({ "insight": top })),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    let viz = &viz["visualization"];
    assert_eq!(viz["viz_kind"], "scatter_with_fit_line");
    assert!(viz["slope"].is_number());
    assert!(viz["intercept"].is_number());
    assert_eq!(viz["points"].as_array().unwrap().len(), 10);
}

#[tokio::test]
async fn overview_and_neighborhood() {
    let app = app();
    let id = upload(&app, BETTER_LIFE).await;
    let (status, v) = call(
        &app,
        Method::GET,
        &format!("/v1/datasets/{id}/overview/linear_relationship?mode=exact"),
        None,
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["overview"]["attributes"].as_array().unwrap().len(), 4);
    let (_, q) = call(
        &app,
        Method::POST,
        &format!("/v1/datasets/{id}/query"),
        Some(json!({ "class_id": "skew", "limit": 1 })),
    )
    .await;
    let (status, n) = call(
        &app,
        Method::POST,
        &format!("/v1/datasets/{id}/neighborhood"),
        Some(json!({ "focus": q["insights"][0], "limit": 3 })),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert!(n["neighbors"].as_array().unwrap().len() <= 3);
    let (_, classes) = call(&app, Method::GET, "/v1/classes", None).await;
    assert_eq!(classes["classes"].as_array().unwrap().len(), 7);
}

#[tokio::test]
async fn errors_map_to_status_codes() {
    let app = app();
    let id = upload(&app, BETTER_LIFE).await;
    let qpath = format!("/v1/datasets/{id}/query");

    let (s, v) = call_raw(&app, Method::POST, &qpath, Some(b"{nope".to_vec())).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let v: Value = serde_json::from_slice(&v).unwrap();
    assert_eq!(v["error"]["code"], "bad_request");
    assert_eq!(v["api_version"], API_VERSION);

    let (s, v) = call(
        &app,
        Method::POST,
        &qpath,
        Some(json!({ "class_id": "skew", "fixed": ["Nope"] })),
    )
    .await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"]["detail"]["attribute"], "Nope");
    let (s, _) = call(
        &app,
        Method::POST,
        &qpath,
        Some(json!({ "class_id": "skew", "limit": 0 })),
    )
    .await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let (s, _) = call(
        &app,
        Method::POST,
        &qpath,
        Some(json!({ "class_id": "skew", "limit": 51 })),
    )
    .await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let (s, _) = call(
        &app,
        Method::GET,
        &format!("/v1/datasets/{id}/overview/bogus"),
        None,
    )
    .await;
    assert_eq!(s, StatusCode::BAD_REQUEST);

    let (s, v) = call(&app, Method::GET, "/v1/datasets/ds-999", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert_eq!(v["error"]["code"], "not_found");
    let (s, _) = call(&app, Method::GET, "/v1/sessions/s-999", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let (s, _) = call(&app, Method::GET, "/v1/elsewhere", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);

    let (s, v) = call_raw(
        &app,
        Method::POST,
        "/v1/datasets",
        Some(b"a,b\n1,2\n3\n".to_vec()),
    )
    .await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let v: Value = serde_json::from_slice(&v).unwrap();
    assert!(v["error"]["detail"]["row"].is_number());

    // A saved state only loads against the dataset it was made from.
    let other = upload(&app, "x,y\n1,2\n2,4\n3,7\n").await;
    let (_, sess) = call(
        &app,
        Method::POST,
        "/v1/sessions",
        Some(json!({ "dataset_id": id })),
    )
    .await;
    let sid = sess["session_id"].as_str().unwrap();
    let (_, saved) = call(&app, Method::GET, &format!("/v1/sessions/{sid}/save"), None).await;
    let (s, v) = call(
        &app,
        Method::POST,
        "/v1/sessions/load",
        Some(json!({ "dataset_id": other, "document": saved["document"] })),
    )
    .await;
    assert_eq!(s, StatusCode::CONFLICT);
    assert_eq!(v["error"]["code"], "conflict");
}

#[tokio::test]
async fn repeated_reads_are_byte_identical() {
    let app = app();
    let id = upload(&app, BETTER_LIFE).await;
    let body = json!({ "class_id": "dispersion", "limit": 5 })
        .to_string()
        .into_bytes();
    let path = format!("/v1/datasets/{id}/query");
    let first = call_raw(&app, Method::POST, &path, Some(body.clone())).await;
    wait_precompute(&app, &id).await;
    for _ in 0..3 {
        assert_eq!(
            call_raw(&app, Method::POST, &path, Some(body.clone())).await,
            first
        );
    }
    let ov = format!("/v1/datasets/{id}/overview/monotonic_relationship");
    let a = call_raw(&app, Method::GET, &ov, None).await;
    assert_eq!(call_raw(&app, Method::GET, &ov, None).await, a);
}

#[tokio::test]
async fn session_flow() {
    let app = app();
    let id = upload(&app, BETTER_LIFE).await;
    let (s, sess) = call(
        &app,
        Method::POST,
        "/v1/sessions",
        Some(json!({ "dataset_id": id })),
    )
    .await;
    assert_eq!(s, StatusCode::CREATED);
    let sid = sess["session_id"].as_str().unwrap().to_string();
    let base = sess["state"]["recommendations"].clone();
    let focus = base["linear_relationship"][0].clone();

    let (s, v) = call(
        &app,
        Method::POST,
        &format!("/v1/sessions/{sid}/focus"),
        Some(json!({ "insight": focus })),
    )
    .await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["state"]["focus"].as_array().unwrap().len(), 1);
    let recs = v["state"]["recommendations"]["linear_relationship"]
        .as_array()
        .unwrap();
    assert!(recs.iter().all(|d| d["tuple"] != focus["tuple"]));

    let (s, v) = call(
        &app,
        Method::PUT,
        &format!("/v1/sessions/{sid}/constraints"),
        Some(
            json!({ "class_id": "linear_relationship", "metric_range": { "lo": 0.0, "hi": 0.6 } }),
        ),
    )
    .await;
    assert_eq!(s, StatusCode::OK);
    for d in v["state"]["recommendations"]["linear_relationship"]
        .as_array()
        .unwrap()
    {
        assert!(d["value"].as_f64().unwrap() <= 0.6);
    }

    let (_, saved) = call(&app, Method::GET, &format!("/v1/sessions/{sid}/save"), None).await;
    let (s, loaded) = call(
        &app,
        Method::POST,
        "/v1/sessions/load",
        Some(json!({ "dataset_id": id, "document": saved["document"] })),
    )
    .await;
    assert_eq!(s, StatusCode::CREATED);
    assert_ne!(loaded["session_id"], sid.as_str());
    let (_, current) = call(&app, Method::GET, &format!("/v1/sessions/{sid}"), None).await;
    assert_eq!(loaded["state"], current["state"]);

    let (s, v) = call(
        &app,
        Method::DELETE,
        &format!("/v1/sessions/{sid}/constraints/linear_relationship"),
        None,
    )
    .await;
    assert_eq!(s, StatusCode::OK);
    assert!(v["state"]["constraints"].as_object().unwrap().is_empty());

    let (s, v) = call(
        &app,
        Method::POST,
        &format!("/v1/sessions/{sid}/unfocus"),
        Some(json!({ "insight": focus })),
    )
    .await;
    assert_eq!(s, StatusCode::OK);
    assert!(v["warning"].is_null());
    assert_eq!(v["state"]["recommendations"], base);

    let (s, v) = call(
        &app,
        Method::POST,
        &format!("/v1/sessions/{sid}/unfocus"),
        Some(json!({ "insight": focus })),
    )
    .await;
    assert_eq!(s, StatusCode::OK);
    assert!(v["warning"].is_string());

    let mut stale = focus.clone();
    stale["tuple"][0] = "Gone".into();
    let (s, v) = call(
        &app,
        Method::POST,
        &format!("/v1/sessions/{sid}/focus"),
        Some(json!({ "insight": stale })),
    )
    .await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"]["detail"]["attribute"], "Gone");
}
