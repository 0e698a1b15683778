"""
Scripted UCI engine for the test-suite. Speaks enough of the protocol for python-chess:
material evaluation, one ply of capture lookahead from depth 4 on, and node counts that
grow with depth and the number of legal moves.

Usage: python fake_uci_engine.py [--name NAME] [--silent] [--crash] [--crash-once FLAGFILE]
       [--stall] [--stall-once FLAGFILE]
"""
import os
import sys
import argparse
import threading
import chess

PIECE_VALUES = {
    chess.PAWN: 100,
    chess.KNIGHT: 300,
    chess.BISHOP: 300,
    chess.ROOK: 500,
    chess.QUEEN: 900,
    chess.KING: 0
}
MATE = "mate"

def send(message: str) -> None:
    print(message, flush=True)

def material(board: chess.Board, color: chess.Color) -> int:
    total = 0
    for piece in board.piece_map().values():
        value = PIECE_VALUES[piece.piece_type]
        total += value if piece.color == color else -value
    return total

def score_move(board: chess.Board, move: chess.Move, depth: int):
    """Mover-perspective score after `move`; MATE for a mating move."""
    mover = board.turn
    board.push(move)
    try:
        if board.is_checkmate():
            return MATE
        if board.is_stalemate():
            return 0

        score = material(board, mover)
        if depth >= 4:
            worst = score
            for reply in board.generate_legal_captures():
                board.push(reply)
                worst = min(worst, material(board, mover))
                board.pop()
            score = worst
        # small positional term so lines rarely tie
        score += len(board.attacks(move.to_square)) - (3 if board.is_check() else 0)
        return score
    finally:
        board.pop()

def analyse(board: chess.Board, depth: int, multipv: int) -> None:
    moves = list(board.legal_moves)
    scored = []
    for move in moves:
        value = score_move(board, move, depth)
        rank = 10 ** 6 if value == MATE else value
        scored.append((rank, value, move))
    scored.sort(key=lambda item: (-item[0], item[2].uci()))

    nodes = 1000 * depth + 37 * len(moves) + 11 * len(board.piece_map())
    elapsed = max(nodes // 500, 1)
    for index, (_, value, move) in enumerate(scored[:multipv], start=1):
        score = "mate 1" if value == MATE else f"cp {value}"
        send(f"info depth {depth} seldepth {depth} multipv {index} score {score} nodes {nodes} time {elapsed} pv {move.uci()}")
    send(f"bestmove {scored[0][2].uci()}" if scored else "bestmove 0000")

def set_position(tokens) -> chess.Board:
    if tokens[1] == "startpos":
        board = chess.Board()
        rest = tokens[2:]
    else:
        end = tokens.index("moves") if "moves" in tokens else len(tokens)
        board = chess.Board(" ".join(tokens[2:end]))
        rest = tokens[end:]

    if rest and rest[0] == "moves":
        for uci in rest[1:]:
            board.push_uci(uci)
    return board

def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--name", default="Fake Engine")
    parser.add_argument("--silent", action="store_true")
    parser.add_argument("--crash", action="store_true")
    parser.add_argument("--crash-once")
    parser.add_argument("--stall", action="store_true")
    parser.add_argument("--stall-once")
    args = parser.parse_args()

    if args.silent:
        timer = threading.Timer(30, lambda: os._exit(0))
        timer.daemon = True
        timer.start()

    board = chess.Board()
    multipv = 1
    for line in sys.stdin:
        tokens = line.split()
        if not tokens or args.silent:
            continue

        command = tokens[0]
        if command == "uci":
            send(f"id name {args.name}")
            send("id author chessbench tests")
            send("option name Hash type spin default 16 min 1 max 1024")
            send("option name Threads type spin default 1 min 1 max 64")
            send("option name MultiPV type spin default 1 min 1 max 256")
            send("option name Clear Hash type button")
            send("uciok")
        elif command == "isready":
            send("readyok")
        elif command == "setoption":
            if "MultiPV" in tokens and "value" in tokens:
                multipv = int(tokens[tokens.index("value") + 1])
        elif command == "position":
            board = set_position(tokens)
        elif command == "go":
            if args.crash:
                os._exit(3)
            if args.crash_once and not os.path.exists(args.crash_once):
                open(args.crash_once, "w").close()
                os._exit(3)
            # never answers; the session has to give up on the search
            if args.stall:
                continue
            if args.stall_once and not os.path.exists(args.stall_once):
                open(args.stall_once, "w").close()
                continue
            depth = int(tokens[tokens.index("depth") + 1]) if "depth" in tokens else 1
            analyse(board, depth, multipv)
        elif command == "quit":
            break

if __name__ == "__main__":
    main()
