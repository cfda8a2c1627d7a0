//! Scripted local HTTP servers for hermetic harvesting tests.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::Instant;

/// A request as seen by the fixture server.
#[derive(Debug, Clone)]
pub struct SeenRequest {
    /// Path plus query, as sent.
    pub url: String,
    pub path: String,
    pub query: BTreeMap<String, String>,
    pub headers: BTreeMap<String, String>,
    pub at: Instant,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixtureResponse {
    pub status: u16,
    pub headers: Vec<(String, String)>,
    pub body: Vec<u8>,
}

impl FixtureResponse {
    pub fn ok(body: impl Into<Vec<u8>>) -> Self {
        FixtureResponse { status: 200, headers: Vec::new(), body: body.into() }
    }

    pub fn status(status: u16) -> Self {
        FixtureResponse { status, headers: Vec::new(), body: Vec::new() }
    }

    pub fn with_header(mut self, name: &str, value: &str) -> Self {
        self.headers.push((name.to_string(), value.to_string()));
        self
    }
}

type Handler = Box<dyn FnMut(&SeenRequest) -> FixtureResponse + Send>;

/// Serves responses from a handler on an ephemeral localhost port and logs
/// every request. The server stops when dropped.
pub struct FixtureServer {
    server: Arc<tiny_http::Server>,
    log: Arc<Mutex<Vec<SeenRequest>>>,
    thread: Option<JoinHandle<()>>,
    base: String,
}

impl FixtureServer {
    pub fn start(handler: impl FnMut(&SeenRequest) -> FixtureResponse + Send + 'static) -> Self {
        let server = Arc::new(tiny_http::Server::http("127.0.0.1:0").expect("bind fixture server"));
        let port = server.server_addr().to_ip().expect("ip listener").port();
        let log = Arc::new(Mutex::new(Vec::new()));
        let mut handler: Handler = Box::new(handler);
        let thread = {
            let server = Arc::clone(&server);
            let log = Arc::clone(&log);
            std::thread::spawn(move || {
                for req in server.incoming_requests() {
                    let seen = seen(&req);
                    let resp = handler(&seen);
                    log.lock().expect("request log").push(seen);
                    let mut out = tiny_http::Response::from_data(resp.body).with_status_code(resp.status);
                    for (k, v) in &resp.headers {
                        out.add_header(tiny_http::Header::from_bytes(k.as_bytes(), v.as_bytes()).expect("valid header"));
                    }
                    let _ = req.respond(out);
                }
            })
        };
        FixtureServer { server, log, thread: Some(thread), base: format!("http://127.0.0.1:{port}") }
    }

    /// Answers requests with `responses` in order, then with 404.
    pub fn sequence(responses: Vec<FixtureResponse>) -> Self {
        let mut queue = responses.into_iter();
        Self::start(move |_| queue.next().unwrap_or_else(|| FixtureResponse::status(404)))
    }

    /// Answers by exact path, 404 otherwise.
    pub fn routes(routes: Vec<(String, FixtureResponse)>) -> Self {
        let map: BTreeMap<String, FixtureResponse> = routes.into_iter().collect();
        Self::start(move |r| map.get(&r.path).cloned().unwrap_or_else(|| FixtureResponse::status(404)))
    }

    /// Base URL without a trailing slash.
    pub fn url(&self) -> &str {
        &self.base
    }

    pub fn requests(&self) -> Vec<SeenRequest> {
        self.log.lock().expect("request log").clone()
    }

    pub fn request_count(&self) -> usize {
        self.log.lock().expect("request log").len()
    }
}

impl Drop for FixtureServer {
    fn drop(&mut self) {
        self.server.unblock();
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

fn seen(req: &tiny_http::Request) -> SeenRequest {
    let raw = req.url().to_string();
    let parsed = url::Url::parse(&format!("http://fixture{raw}")).expect("request target parses");
    let path = percent_decode(parsed.path());
    SeenRequest {
        url: raw,
        path,
        query: parsed.query_pairs().into_owned().collect(),
        headers: req.headers().iter().map(|h| (h.field.as_str().as_str().to_ascii_lowercase(), h.value.to_string())).collect(),
        at: Instant::now(),
    }
}

fn percent_decode(s: &str) -> String {
    url::form_urlencoded::parse(format!("x={}", s.replace('+', "%2B")).as_bytes())
        .next()
        .map(|(_, v)| v.into_owned())
        .unwrap_or_default()
}

/// Renders one `oai_dc` record for a `ListRecords` page.
pub fn oai_dc_record(identifier: &str, datestamp: &str, dc: &[(&str, &str)]) -> String {
    let fields: String = dc.iter().map(|(k, v)| format!("<dc:{k}>{}</dc:{k}>", xml_escape(v))).collect();
    format!(
        "<record><header><identifier>{identifier}</identifier><datestamp>{datestamp}</datestamp></header>\
         <metadata><oai_dc:dc xmlns:oai_dc=\"http://www.openarchives.org/OAI/2.0/oai_dc/\" \
         xmlns:dc=\"http://purl.org/dc/elements/1.1/\">{fields}</oai_dc:dc></metadata></record>"
    )
}

/// Wraps records into a `ListRecords` response. `token` of `Some("")` marks
/// the last page of a resumed list.
pub fn oai_list_records(records: &[String], token: Option<&str>) -> String {
    let token = match token {
        Some(t) => format!("<resumptionToken>{}</resumptionToken>", xml_escape(t)),
        None => String::new(),
    };
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<OAI-PMH xmlns=\"http://www.openarchives.org/OAI/2.0/\">\
         <responseDate>2020-01-01T00:00:00Z</responseDate><request verb=\"ListRecords\">http://fixture/oai</request>\
         <ListRecords>{}{token}</ListRecords></OAI-PMH>\n",
        records.concat()
    )
}

pub fn oai_error(code: &str, message: &str) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<OAI-PMH xmlns=\"http://www.openarchives.org/OAI/2.0/\">\
         <responseDate>2020-01-01T00:00:00Z</responseDate><request verb=\"ListRecords\">http://fixture/oai</request>\
         <error code=\"{code}\">{}</error></OAI-PMH>\n",
        xml_escape(message)
    )
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}
