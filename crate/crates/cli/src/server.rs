//! WebSocket transport for live sessions: one session per connection, one
//! JSON message per text frame.

use anyhow::Result;
use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::Response;
use axum::routing::get;
use axum::Router;
use slicetype::service::{ServerMessage, SessionService};
use tokio::net::TcpListener;

pub fn router(service: SessionService) -> Router {
    Router::new().route("/ws", get(upgrade)).with_state(service)
}

pub async fn serve(listener: TcpListener, service: SessionService) -> Result<()> {
    axum::serve(listener, router(service)).await?;
    Ok(())
}

async fn upgrade(ws: WebSocketUpgrade, State(service): State<SessionService>) -> Response {
    ws.on_upgrade(move |socket| connection(socket, service))
}

async fn send_all(socket: &mut WebSocket, messages: Vec<ServerMessage>) -> bool {
    for m in messages {
        let text = serde_json::to_string(&m).expect("server messages serialize");
        if socket.send(Message::Text(text.into())).await.is_err() {
            return false;
        }
    }
    true
}

async fn connection(mut socket: WebSocket, service: SessionService) {
    let (mut live, greeting) = match service.open_session() {
        Ok(opened) => opened,
        Err(_) => return,
    };
    if !send_all(&mut socket, greeting).await {
        return;
    }
    while let Some(Ok(msg)) = socket.recv().await {
        let replies = match msg {
            Message::Text(text) => live.handle_text(text.as_str()),
            Message::Binary(bytes) => match std::str::from_utf8(&bytes) {
                Ok(text) => live.handle_text(text),
                Err(_) => live.handle_text("\u{0}"),
            },
            Message::Close(_) => break,
            Message::Ping(_) | Message::Pong(_) => continue,
        };
        if !send_all(&mut socket, replies).await {
            break;
        }
    }
    service.close(live);
}
