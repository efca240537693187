# Copyright 2026 The sim2real-lanes Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""HTTP bridge between the simlanes generator and a running CARLA server.

Run next to the CARLA server (needs the `carla` Python package matching the
server version):

    python3 carla_bridge.py --carla-host localhost --carla-port 2000 --port 2010

CARLA uses a left-handed frame (x forward, y right, z up, yaw clockwise).
Everything sent to the C++ side is converted to right-handed ENU by
flipping y and negating yaw.
"""

import argparse
import json
import math
import random
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import carla  # noqa: E402  (only available where CARLA is installed)

MARKINGS = {
    (carla.LaneMarkingType.Broken, carla.LaneMarkingColor.White): "broken_white",
    (carla.LaneMarkingType.Broken, carla.LaneMarkingColor.Yellow): "broken_yellow",
    (carla.LaneMarkingType.Solid, carla.LaneMarkingColor.White): "solid_white",
    (carla.LaneMarkingType.Solid, carla.LaneMarkingColor.Yellow): "solid_yellow",
    (carla.LaneMarkingType.SolidSolid, carla.LaneMarkingColor.White): "solid_solid_white",
    (carla.LaneMarkingType.SolidSolid, carla.LaneMarkingColor.Yellow): "solid_solid_yellow",
    (carla.LaneMarkingType.SolidBroken, carla.LaneMarkingColor.White): "solid_broken_white",
    (carla.LaneMarkingType.SolidBroken, carla.LaneMarkingColor.Yellow): "solid_broken_yellow",
    (carla.LaneMarkingType.BrokenSolid, carla.LaneMarkingColor.White): "broken_solid_white",
    (carla.LaneMarkingType.BrokenSolid, carla.LaneMarkingColor.Yellow): "broken_solid_yellow",
    (carla.LaneMarkingType.BrokenBroken, carla.LaneMarkingColor.White): "broken_broken_white",
    (carla.LaneMarkingType.BrokenBroken, carla.LaneMarkingColor.Yellow): "broken_broken_yellow",
}


def marking_name(marking):
    if marking.type == carla.LaneMarkingType.BottsDots:
        return "botts_dots"
    if marking.type == carla.LaneMarkingType.Curb:
        return "curb"
    return MARKINGS.get((marking.type, marking.color), "other")


def enu(loc):
    return [loc.x, -loc.y, loc.z]


def enu_yaw(yaw_deg):
    return -math.radians(yaw_deg)


class Session:
    def __init__(self, args):
        self.client = carla.Client(args.carla_host, args.carla_port)
        self.client.set_timeout(args.timeout)
        self.width, self.height, self.fov = args.width, args.height, args.fov
        self.mount_height, self.mount_pitch = args.mount_height, args.mount_pitch
        self.world = None
        self.ego = None
        self.sensor = None
        self.traffic = []
        self.last_image = None
        self.time_s = 0.0

    # -- world management -------------------------------------------------
    def maps(self):
        return sorted({m.split("/")[-1] for m in self.client.get_available_maps()})

    def load_map(self, name, seed):
        if name not in self.maps():
            raise KeyError(f"map {name} not available")
        self.world = self.client.load_world(name)
        settings = self.world.get_settings()
        settings.synchronous_mode = True
        settings.fixed_delta_seconds = 0.1
        self.world.apply_settings(settings)
        tm = self.client.get_trafficmanager()
        tm.set_synchronous_mode(True)
        tm.set_random_device_seed(seed)
        random.seed(seed)
        self.time_s = 0.0

    def _destroy(self):
        for actor in [self.sensor, self.ego] + self.traffic:
            if actor is not None:
                actor.destroy()
        self.sensor, self.ego, self.traffic = None, None, []

    def respawn(self, seed):
        rng = random.Random(seed)
        self._destroy()
        lib = self.world.get_blueprint_library()
        spawns = self.world.get_map().get_spawn_points()
        rng.shuffle(spawns)
        ego_bp = lib.find("vehicle.tesla.model3")
        self.ego = self.world.try_spawn_actor(ego_bp, spawns[0])
        self.ego.set_autopilot(True)
        for sp in spawns[1:40]:
            bp = rng.choice(lib.filter("vehicle.*"))
            actor = self.world.try_spawn_actor(bp, sp)
            if actor is not None:
                actor.set_autopilot(True)
                self.traffic.append(actor)
        cam_bp = lib.find("sensor.camera.rgb")
        cam_bp.set_attribute("image_size_x", str(self.width))
        cam_bp.set_attribute("image_size_y", str(self.height))
        cam_bp.set_attribute("fov", str(self.fov))
        tf = carla.Transform(carla.Location(x=1.0, z=self.mount_height),
                             carla.Rotation(pitch=-self.mount_pitch))
        self.sensor = self.world.spawn_actor(cam_bp, tf, attach_to=self.ego)
        self.sensor.listen(self._on_image)

    def _on_image(self, image):
        self.last_image = image

    def tick(self, dt):
        steps = max(1, round(dt / 0.1))
        for _ in range(steps):
            self.world.tick()
        self.time_s += steps * 0.1
        tf = self.ego.get_transform()
        return {"time_s": self.time_s, "position": enu(tf.location),
                "yaw": enu_yaw(tf.rotation.yaw)}

    def weather(self, w):
        p = carla.WeatherParameters(
            cloudiness=w["cloudiness"], precipitation=w["precipitation"],
            precipitation_deposits=w["precipitation_deposits"],
            sun_altitude_angle=w["sun_altitude_deg"],
            wetness=w["precipitation_deposits"])
        self.world.set_weather(p)

    # -- lanes -------------------------------------------------------------
    def _walk(self, wp, behind, ahead, spacing):
        back = []
        cur = wp
        d = 0.0
        while d < behind:
            prev = cur.previous(spacing)
            if not prev:
                break
            cur = prev[0]
            back.append(cur)
            d += spacing
        fwd = [wp]
        cur = wp
        d = 0.0
        while d < ahead:
            nxt = cur.next(spacing)
            if not nxt:
                break
            cur = nxt[0]
            fwd.append(cur)
            d += spacing
        return list(reversed(back)) + fwd

    def lanes(self, behind, ahead, spacing):
        wp = self.world.get_map().get_waypoint(self.ego.get_location())
        row = [wp]
        left = wp.get_left_lane()
        while left is not None and left.lane_type == carla.LaneType.Driving \
                and left.lane_id * wp.lane_id > 0 and len(row) < 4:
            row.insert(0, left)
            left = left.get_left_lane()
        right = wp.get_right_lane()
        while right is not None and right.lane_type == carla.LaneType.Driving and len(row) < 5:
            row.append(right)
            right = right.get_right_lane()
        lanes = []
        for lane_wp in row:
            pts = self._walk(lane_wp, behind, ahead, spacing)
            lanes.append({
                "centers": [enu(p.transform.location) for p in pts],
                "headings": [enu_yaw(p.transform.rotation.yaw) for p in pts],
                "width": lane_wp.lane_width,
                "left_marking": marking_name(lane_wp.left_lane_marking),
                "right_marking": marking_name(lane_wp.right_lane_marking),
            })
        return {"ego_index": row.index(wp), "lanes": lanes}

    def camera(self):
        tf = self.sensor.get_transform()
        f = self.width / (2.0 * math.tan(math.radians(self.fov) / 2.0))
        return {
            "intrinsics": {"fx": f, "fy": f, "cx": self.width / 2.0, "cy": self.height / 2.0,
                           "width": self.width, "height": self.height},
            "pose": {"position": enu(tf.location), "yaw": enu_yaw(tf.rotation.yaw),
                     "pitch": -math.radians(tf.rotation.pitch),
                     "roll": math.radians(tf.rotation.roll)},
        }

    def capture_png(self):
        import numpy as np
        import cv2
        self.world.tick()
        img = self.last_image
        arr = np.frombuffer(img.raw_data, dtype=np.uint8).reshape(img.height, img.width, 4)
        ok, buf = cv2.imencode(".png", arr[:, :, :3])
        return buf.tobytes()

    def metadata(self):
        tf = self.ego.get_transform()
        return {"map": self.world.get_map().name, "ego": enu(tf.location),
                "yaw": enu_yaw(tf.rotation.yaw), "actors": len(self.traffic)}


def make_handler(session):
    class Handler(BaseHTTPRequestHandler):
        def _send(self, code, body, ctype="application/json"):
            data = body if isinstance(body, bytes) else json.dumps(body).encode()
            self.send_response(code)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)

        def do_GET(self):
            try:
                if self.path == "/maps":
                    self._send(200, {"maps": session.maps()})
                elif self.path == "/camera":
                    self._send(200, session.camera())
                elif self.path == "/capture":
                    self._send(200, session.capture_png(), "image/png")
                elif self.path == "/metadata":
                    self._send(200, session.metadata())
                else:
                    self._send(404, {"error": "no such endpoint"})
            except Exception as exc:  # reported to the C++ side as a backend error
                self._send(500, {"error": str(exc)})

        def do_POST(self):
            body = json.loads(self.rfile.read(int(self.headers["Content-Length"])) or b"{}")
            try:
                if self.path == "/load_map":
                    session.load_map(body["map"], body["seed"])
                    self._send(200, {"ok": True})
                elif self.path == "/respawn":
                    session.respawn(body["seed"])
                    self._send(200, {"ok": True})
                elif self.path == "/tick":
                    self._send(200, session.tick(body["dt"]))
                elif self.path == "/weather":
                    session.weather(body)
                    self._send(200, {"ok": True})
                elif self.path == "/lanes":
                    self._send(200, session.lanes(body["behind"], body["ahead"], body["spacing"]))
                else:
                    self._send(404, {"error": "no such endpoint"})
            except KeyError as exc:
                self._send(404, {"error": str(exc)})
            except Exception as exc:
                self._send(500, {"error": str(exc)})

        def log_message(self, fmt, *args):
            pass

    return Handler


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--carla-host", default="localhost")
    ap.add_argument("--carla-port", type=int, default=2000)
    ap.add_argument("--port", type=int, default=2010)
    ap.add_argument("--timeout", type=float, default=20.0)
    ap.add_argument("--width", type=int, default=1280)
    ap.add_argument("--height", type=int, default=720)
    ap.add_argument("--fov", type=float, default=70.0)
    ap.add_argument("--mount-height", type=float, default=1.5)
    ap.add_argument("--mount-pitch", type=float, default=4.0)
    args = ap.parse_args()
    server = ThreadingHTTPServer(("0.0.0.0", args.port), make_handler(Session(args)))
    server.serve_forever()


if __name__ == "__main__":
    main()
