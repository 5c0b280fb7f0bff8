use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use axum::Router;
use gatherplot::request::PlotRequest;
use gatherplot::service::{router, Registry};
use gatherplot_core::model::read_csv;
use gatherplot_core::{plot, Layout};
use http_body_util::BodyExt;
use tower::ServiceExt;

const CARS: &str = include_str!("../../../data/cars.csv");

async fn send(app: &Router, req: Request<Body>) -> (StatusCode, String, Option<String>) {
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let ctype = resp
        .headers()
        .get(header::CONTENT_TYPE)
        .map(|v| v.to_str().unwrap().to_string());
    let body = resp.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(body.to_vec()).unwrap(), ctype)
}

async fn get(app: &Router, uri: &str) -> (StatusCode, String) {
    let (s, b, _) = send(app, Request::get(uri).body(Body::empty()).unwrap()).await;
    (s, b)
}

async fn upload(app: &Router, csv: &str) -> u64 {
    let req = Request::post("/datasets")
        .header(header::CONTENT_TYPE, "text/csv")
        .body(Body::from(csv.to_string()))
        .unwrap();
    let (status, body, ctype) = send(app, req).await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    assert_eq!(ctype.as_deref(), Some("application/json"));
    let v: serde_json::Value = serde_json::from_str(&body).unwrap();
    v["id"].as_u64().unwrap()
}

fn app() -> Router {
    router(Arc::new(Registry::default()))
}

fn errors(body: &str) -> Vec<String> {
    let v: serde_json::Value = serde_json::from_str(body).unwrap();
    v["errors"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["field"].as_str().unwrap().to_string())
        .collect()
}

#[tokio::test]
async fn upload_returns_schema() {
    let app = app();
    let req = Request::post("/datasets").body(Body::from(CARS)).unwrap();
    let (status, body, _) = send(&app, req).await;
    assert_eq!(status, StatusCode::CREATED);
    let v: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v["rows"], 406);
    assert_eq!(v["schema"][8]["name"], "origin");
    assert_eq!(v["schema"][8]["kind"], "nominal");
    assert_eq!(upload(&app, CARS).await, v["id"].as_u64().unwrap() + 1);
}

#[tokio::test]
async fn undefined_axes_gather_everything() {
    let app = app();
    let id = upload(&app, CARS).await;
    let (status, body) = get(&app, &format!("/datasets/{id}/layout?x=undefined&y=undefined")).await;
    assert_eq!(status, StatusCode::OK);
    let layout = Layout::from_json(&body).unwrap();
    assert_eq!(layout.x_axis.len(), 1);
    assert_eq!(layout.y_axis.len(), 1);
    assert_eq!(layout.marks.len(), 406);
    assert!(layout.marks.iter().all(|m| m.cell == (0, 0)));
}

#[tokio::test]
async fn layout_matches_library_bytes() {
    let app = app();
    let id = upload(&app, CARS).await;
    let ds = read_csv(CARS.as_bytes()).unwrap();
    for query in [
        "x=origin&y=mpg&bins=mpg%3D5",
        "x=cylinders&y=origin&color=origin&mode=relative",
        "x=horsepower&y=weight&x_transform=jitter&seed=3&width=500&height=400",
        "x=origin&y=cylinders&x_fold=USA%3Aminimized",
    ] {
        let (status, body) = get(&app, &format!("/datasets/{id}/layout?{query}")).await;
        assert_eq!(status, StatusCode::OK, "{query}: {body}");
        let (cfg, opts) = PlotRequest::from_query(query).unwrap().resolve(&ds).unwrap();
        assert_eq!(body, plot(&ds, &cfg, &opts).unwrap().to_json(), "{query}");
    }
}

#[tokio::test]
async fn unknown_dataset_is_404() {
    let app = app();
    for uri in [
        "/datasets/7/layout",
        "/datasets/abc/stats",
        "/datasets/0/transition?t=0",
    ] {
        let (status, body) = get(&app, uri).await;
        assert_eq!(status, StatusCode::NOT_FOUND, "{uri}");
        assert_eq!(errors(&body), ["id"]);
    }
}

#[tokio::test]
async fn invalid_requests_are_422_with_fields() {
    let app = app();
    let id = upload(&app, CARS).await;
    let cases = [
        ("layout?x=wheels", vec!["x"]),
        ("layout?mode=loud&width=0", vec!["mode", "width"]),
        (
            "layout?x=origin&x_fold=USA%3Aminimized&x_fold=Europe%3Aminimized&x_fold=Japan%3Aminimized",
            vec!["x_fold"],
        ),
        ("layout?x=origin&x_fold=Mars%3Amaximized", vec!["x_fold"]),
        ("layout?x=mpg&bins=mpg%3D0.0001", vec!["bins"]),
        ("stats?x=origin&s=-1", vec!["s"]),
        ("stats?y=wheels", vec!["y"]),
        ("transition?from=x%3Dorigin&t=0.5", vec!["to"]),
        ("transition?from=x%3Dorigin&to=x%3Dwheels&t=0.5", vec!["to.x"]),
        ("transition?from=x%3Dorigin&to=x%3Dmpg&t=0.5", vec!["to"]),
    ];
    for (path, fields) in cases {
        let (status, body) = get(&app, &format!("/datasets/{id}/{path}")).await;
        assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{path}: {body}");
        assert_eq!(errors(&body), fields, "{path}");
    }
    let req = Request::post("/datasets").body(Body::from("a,b\n1\n")).unwrap();
    let (status, body, _) = send(&app, req).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(errors(&body), ["body"]);
}

#[tokio::test]
async fn stats_for_coincident_points() {
    let app = app();
    let id = upload(&app, "a,b\n3.5,1.25\n3.5,1.25\n").await;
    let (status, body) = get(&app, &format!("/datasets/{id}/stats?x=a&y=b&s=1")).await;
    assert_eq!(status, StatusCode::OK);
    let v: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v["overlap_x"], 1);
    assert_eq!(v["overlap_y"], 1);
    assert_eq!(v["overplotting"], 1);
}

#[tokio::test]
async fn transition_endpoints_equal_layouts() {
    let app = app();
    let id = upload(&app, CARS).await;
    let from = "x=origin&y=cylinders";
    let to = "x=cylinders&y=origin&mode=relative";
    let enc = |s: &str| form_urlencoded::byte_serialize(s.as_bytes()).collect::<String>();
    let (_, from_json) = get(&app, &format!("/datasets/{id}/layout?{from}")).await;
    let (_, to_json) = get(&app, &format!("/datasets/{id}/layout?{to}")).await;
    for (t, expected) in [("0", &from_json), ("1", &to_json)] {
        let uri = format!("/datasets/{id}/transition?from={}&to={}&t={t}", enc(from), enc(to));
        let (status, body) = get(&app, &uri).await;
        assert_eq!(status, StatusCode::OK, "{body}");
        assert_eq!(&body, expected, "t={t}");
    }
    let uri = format!("/datasets/{id}/transition?from={}&to={}&t=0.5", enc(from), enc(to));
    let (status, body) = get(&app, &uri).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(Layout::from_json(&body).unwrap().marks.len(), 406);
}

#[tokio::test]
async fn concurrent_requests_agree() {
    let app = app();
    let id = upload(&app, CARS).await;
    let uri = format!("/datasets/{id}/layout?x=origin&y=mpg&color=cylinders");
    let handles: Vec<_> = (0..8)
        .map(|_| {
            let app = app.clone();
            let uri = uri.clone();
            tokio::spawn(async move { get(&app, &uri).await.1 })
        })
        .collect();
    let mut bodies = Vec::new();
    for h in handles {
        bodies.push(h.await.unwrap());
    }
    assert!(bodies.windows(2).all(|w| w[0] == w[1]));
}
