use std::time::Duration;

use crate::{HarvestError, Politeness, RateLimiter};

#[derive(Debug, Clone)]
pub struct HttpResponse {
    pub status: u16,
    pub body: Vec<u8>,
}

impl HttpResponse {
    pub fn text(&self) -> String {
        String::from_utf8_lossy(&self.body).into_owned()
    }
}

/// A serialized, rate-limited request stream to one endpoint. Server errors
/// and transport failures are retried with exponential backoff; a 503 with
/// `Retry-After` waits exactly as long as the server asks.
pub struct HttpClient {
    inner: reqwest::blocking::Client,
    limiter: RateLimiter,
    politeness: Politeness,
    headers: Vec<(String, String)>,
    requests: u64,
}

fn retry_after(resp: &reqwest::blocking::Response) -> Option<Duration> {
    let v = resp.headers().get(reqwest::header::RETRY_AFTER)?.to_str().ok()?;
    v.trim().parse::<u64>().ok().map(Duration::from_secs)
}

impl HttpClient {
    pub fn new(politeness: &Politeness, headers: &[(String, String)]) -> Result<Self, HarvestError> {
        let inner = reqwest::blocking::Client::builder()
            .user_agent(concat!("oaclass/", env!("CARGO_PKG_VERSION")))
            .timeout(Duration::from_secs(60))
            .build()
            .map_err(|e| HarvestError::Config(e.to_string()))?;
        Ok(HttpClient {
            inner,
            limiter: RateLimiter::new(politeness.max_requests_per_second),
            politeness: politeness.clone(),
            headers: headers.to_vec(),
            requests: 0,
        })
    }

    /// Requests sent so far, retries included.
    pub fn requests(&self) -> u64 {
        self.requests
    }

    fn backoff(&self, attempt: u32) -> Duration {
        Duration::from_millis(self.politeness.backoff_base_ms.saturating_mul(1u64 << attempt.min(16)))
    }

    /// GETs `url`. Any final status is returned as a response except when
    /// retries are exhausted on 5xx or transport failures.
    pub fn get(&mut self, url: &str) -> Result<HttpResponse, HarvestError> {
        let mut attempt = 0u32;
        loop {
            self.limiter.acquire();
            self.requests += 1;
            log::debug!("GET {url} (attempt {})", attempt + 1);
            let mut req = self.inner.get(url);
            for (k, v) in &self.headers {
                req = req.header(k, v);
            }
            let sent = req.send();
            let (wait, message) = match sent {
                Ok(resp) => {
                    let status = resp.status().as_u16();
                    if !resp.status().is_server_error() {
                        let body = resp.bytes();
                        self.limiter.finish();
                        let body = body
                            .map_err(|e| HarvestError::Transport { url: url.to_string(), message: e.to_string() })?
                            .to_vec();
                        return Ok(HttpResponse { status, body });
                    }
                    let wait = match (status, retry_after(&resp)) {
                        (503, Some(d)) => d,
                        _ => self.backoff(attempt),
                    };
                    (wait, format!("HTTP {status}"))
                }
                Err(e) => (self.backoff(attempt), e.to_string()),
            };
            self.limiter.finish();
            if attempt >= self.politeness.max_retries {
                return Err(HarvestError::Transport {
                    url: url.to_string(),
                    message: format!("{message} after {} attempts", attempt + 1),
                });
            }
            log::warn!("{url}: {message}; retrying in {:.1}s", wait.as_secs_f64());
            std::thread::sleep(wait);
            attempt += 1;
        }
    }
}
