//! Line-oriented TCP front end. Connections run on their own threads; every
//! message is funnelled into the single scheduler thread in arrival order.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc::{self, RecvTimeoutError, Sender};
use std::sync::Arc;
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use log::{debug, warn};

use super::scheduler::{ClientId, Outbound, Scheduler};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ServeOptions {
    /// Wall-clock time per simulated frame.
    pub frame_period: Duration,
    /// Stop after this many frames; `None` runs until stopped.
    pub max_frames: Option<u64>,
}

impl Default for ServeOptions {
    fn default() -> Self {
        Self {
            frame_period: Duration::from_millis(100),
            max_frames: None,
        }
    }
}

enum Event {
    Connected(ClientId, Sender<String>),
    Line(ClientId, String),
    Closed(ClientId),
}

pub struct ServerHandle {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    thread: Option<JoinHandle<Result<()>>>,
}

impl ServerHandle {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    /// Ask the server to stop and wait for it.
    pub fn stop(mut self) -> Result<()> {
        self.stop.store(true, Ordering::SeqCst);
        self.join_inner()
    }

    /// Wait for the server to finish on its own.
    pub fn join(mut self) -> Result<()> {
        self.join_inner()
    }

    fn join_inner(&mut self) -> Result<()> {
        match self.thread.take() {
            Some(t) => t.join().unwrap_or_else(|_| {
                Err(crate::Error::Invalid("server thread panicked".into()))
            }),
            None => Ok(()),
        }
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        let _ = self.join_inner();
    }
}

fn connection(id: ClientId, stream: TcpStream, events: Sender<Event>) -> std::io::Result<()> {
    stream.set_nonblocking(false)?;
    let mut writer = stream.try_clone()?;
    let (tx, rx) = mpsc::channel::<String>();
    if events.send(Event::Connected(id, tx)).is_err() {
        return Ok(());
    }
    thread::spawn(move || {
        for line in rx {
            if writer
                .write_all(line.as_bytes())
                .and_then(|_| writer.write_all(b"\n"))
                .is_err()
            {
                break;
            }
        }
    });
    thread::spawn(move || {
        for line in BufReader::new(stream).lines() {
            match line {
                Ok(l) if l.trim().is_empty() => continue,
                Ok(l) => {
                    if events.send(Event::Line(id, l)).is_err() {
                        return;
                    }
                }
                Err(_) => break,
            }
        }
        let _ = events.send(Event::Closed(id));
    });
    Ok(())
}

/// Bind and start serving on background threads.
pub fn spawn<A: ToSocketAddrs>(
    addr: A,
    mut scheduler: Scheduler,
    opts: ServeOptions,
) -> Result<ServerHandle> {
    let listener = TcpListener::bind(addr)?;
    listener.set_nonblocking(true)?;
    let local = listener.local_addr()?;
    let stop = Arc::new(AtomicBool::new(false));
    let (ev_tx, ev_rx) = mpsc::channel::<Event>();

    let accept_stop = stop.clone();
    thread::spawn(move || {
        let mut next_id: ClientId = 1;
        while !accept_stop.load(Ordering::SeqCst) {
            match listener.accept() {
                Ok((stream, peer)) => {
                    debug!("client {next_id} connected from {peer}");
                    if let Err(e) = connection(next_id, stream, ev_tx.clone()) {
                        warn!("client {next_id}: {e}");
                    }
                    next_id += 1;
                }
                Err(e) if e.kind() == std::io::ErrorKind::WouldBlock => {
                    thread::sleep(Duration::from_millis(5));
                }
                Err(e) => warn!("accept failed: {e}"),
            }
        }
    });

    let loop_stop = stop.clone();
    let thread = thread::spawn(move || -> Result<()> {
        let mut clients: HashMap<ClientId, Sender<String>> = HashMap::new();
        let send = |clients: &HashMap<ClientId, Sender<String>>, out: Vec<Outbound>| {
            for o in out {
                if let Some(tx) = clients.get(&o.client) {
                    let _ = tx.send(o.line);
                }
            }
        };
        let mut frames = 0u64;
        let mut next = Instant::now() + opts.frame_period;
        while !loop_stop.load(Ordering::SeqCst) {
            let wait = next.saturating_duration_since(Instant::now());
            match ev_rx.recv_timeout(wait.min(Duration::from_millis(50))) {
                Ok(Event::Connected(id, tx)) => {
                    clients.insert(id, tx);
                }
                Ok(Event::Line(id, line)) => {
                    let out = scheduler.handle_line(id, &line);
                    send(&clients, out);
                }
                Ok(Event::Closed(id)) => {
                    clients.remove(&id);
                    scheduler.disconnect(id);
                }
                Err(RecvTimeoutError::Timeout) => {}
                Err(RecvTimeoutError::Disconnected) => break,
            }
            if Instant::now() >= next {
                let out = scheduler.advance()?;
                send(&clients, out);
                frames += 1;
                next += opts.frame_period;
                if opts.max_frames.is_some_and(|m| frames >= m) {
                    break;
                }
            }
        }
        loop_stop.store(true, Ordering::SeqCst);
        Ok(())
    });

    Ok(ServerHandle {
        addr: local,
        stop,
        thread: Some(thread),
    })
}

/// Serve until the process is stopped.
pub fn serve<A: ToSocketAddrs>(addr: A, scheduler: Scheduler, opts: ServeOptions) -> Result<()> {
    let handle = spawn(addr, scheduler, opts)?;
    log::info!("listening on {}", handle.addr());
    handle.join()
}
