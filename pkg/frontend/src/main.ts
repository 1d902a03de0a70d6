import { ApiClient } from './api.js';
import { colorFor } from './colormap.js';
import { buildContourLayer } from './contours.js';
import { decodeFrame } from './frames.js';
import { buildMarkers, layerNotice } from './markers.js';
import { buildFitPanel, formatFitPanel } from './panel.js';
import { buildEvolutionOverlay, simulationSlider } from './playback.js';
import {
  DEFAULT_STATE,
  ViewState,
  decodeHash,
  encodeHash,
} from './state.js';
import { TraceList, buildSegmentTable, traceErrorToast } from './trace.js';
import type { SimManifest } from './types.js';

const SVG_NS = 'http://www.w3.org/2000/svg';
const MAP_W = 720;
const MAP_H = 560;

interface LonLatBounds {
  minLon: number;
  minLat: number;
  maxLon: number;
  maxLat: number;
}

function boundsOf(coords: [number, number][]): LonLatBounds {
  let minLon = Infinity;
  let minLat = Infinity;
  let maxLon = -Infinity;
  let maxLat = -Infinity;
  for (const [lon, lat] of coords) {
    minLon = Math.min(minLon, lon);
    maxLon = Math.max(maxLon, lon);
    minLat = Math.min(minLat, lat);
    maxLat = Math.max(maxLat, lat);
  }
  return { minLon, minLat, maxLon, maxLat };
}

class MapProjection {
  constructor(readonly bounds: LonLatBounds) {}

  toPx(lon: number, lat: number): [number, number] {
    const { minLon, minLat, maxLon, maxLat } = this.bounds;
    const x = ((lon - minLon) / (maxLon - minLon || 1)) * MAP_W;
    const y = MAP_H - ((lat - minLat) / (maxLat - minLat || 1)) * MAP_H;
    return [x, y];
  }

  toLonLat(x: number, y: number): [number, number] {
    const { minLon, minLat, maxLon, maxLat } = this.bounds;
    const lon = minLon + (x / MAP_W) * (maxLon - minLon);
    const lat = minLat + ((MAP_H - y) / MAP_H) * (maxLat - minLat);
    return [lon, lat];
  }
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  parent: Element,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (text !== undefined) node.textContent = text;
  parent.appendChild(node);
  return node;
}

export class App {
  private readonly api: ApiClient;
  private state: ViewState = { ...DEFAULT_STATE };
  private readonly traces = new TraceList();
  private projection: MapProjection | null = null;
  private manifest: SimManifest | null = null;

  private svg!: SVGSVGElement;
  private markerLayer!: SVGGElement;
  private contourLayer!: SVGGElement;
  private traceLayer!: SVGGElement;
  private heatCanvas!: HTMLCanvasElement;
  private profileSvg!: SVGSVGElement;
  private featureSelect!: HTMLSelectElement;
  private modelSelect!: HTMLSelectElement;
  private lawSelect!: HTMLSelectElement;
  private timeSlider!: HTMLInputElement;
  private frameSlider!: HTMLInputElement;
  private noticeBox!: HTMLElement;
  private toastBox!: HTMLElement;
  private tableBox!: HTMLElement;
  private fitBox!: HTMLElement;
  private sliderHint!: HTMLElement;

  constructor(
    private readonly root: HTMLElement,
    baseUrl = '',
  ) {
    this.api = new ApiClient(baseUrl);
  }

  async start(): Promise<void> {
    this.state = decodeHash(window.location.hash);
    this.buildDom();
    try {
      const { features } = await this.api.features();
      for (const name of features) {
        const opt = document.createElement('option');
        opt.value = name;
        opt.textContent = name;
        this.featureSelect.appendChild(opt);
      }
      if (!this.state.feature && features.length > 0) {
        this.state.feature = features[0];
      }
      this.featureSelect.value = this.state.feature;
      await this.loadFeature();
    } catch {
      this.noticeBox.textContent = 'service unreachable';
      this.noticeBox.className = 'error-banner';
    }
  }

  private buildDom(): void {
    this.root.innerHTML = '';
    const layout = el('div', this.root);
    layout.className = 'layout';

    const mapPane = el('div', layout);
    this.noticeBox = el('div', mapPane);
    this.svg = document.createElementNS(SVG_NS, 'svg');
    this.svg.setAttribute('width', String(MAP_W));
    this.svg.setAttribute('height', String(MAP_H));
    mapPane.appendChild(this.svg);
    this.contourLayer = document.createElementNS(SVG_NS, 'g');
    this.traceLayer = document.createElementNS(SVG_NS, 'g');
    this.markerLayer = document.createElementNS(SVG_NS, 'g');
    this.svg.append(this.contourLayer, this.traceLayer, this.markerLayer);
    this.svg.addEventListener('click', (ev) => void this.onMapClick(ev));
    this.heatCanvas = el('canvas', mapPane);
    this.heatCanvas.width = MAP_W;
    this.heatCanvas.height = 200;
    this.toastBox = el('div', mapPane);
    this.toastBox.className = 'toast';

    const panel = el('div', layout);
    el('label', panel, 'feature ');
    this.featureSelect = el('select', panel);
    this.featureSelect.addEventListener('change', () => {
      this.state.feature = this.featureSelect.value;
      this.traces.clear();
      void this.loadFeature();
    });
    const clearBtn = el('button', panel, 'clear traces');
    clearBtn.addEventListener('click', () => {
      this.traces.clear();
      this.renderTraces();
    });
    this.tableBox = el('div', panel);
    this.fitBox = el('pre', panel);

    el('label', panel, 'model ');
    this.modelSelect = el('select', panel);
    for (const m of ['erfc', 'linear']) {
      const opt = document.createElement('option');
      opt.value = m;
      opt.textContent = m;
      this.modelSelect.appendChild(opt);
    }
    el('label', panel, ' law ');
    this.lawSelect = el('select', panel);
    for (const w of ['none', 'linear', 'special']) {
      const opt = document.createElement('option');
      opt.value = w;
      opt.textContent = w;
      this.lawSelect.appendChild(opt);
    }
    this.timeSlider = el('input', panel);
    this.timeSlider.type = 'range';
    this.timeSlider.min = '0';
    this.timeSlider.max = '2000';
    this.timeSlider.step = '10';
    for (const ctl of [this.modelSelect, this.lawSelect, this.timeSlider]) {
      ctl.addEventListener('change', () => void this.refreshOverlay());
      ctl.addEventListener('input', () => void this.refreshOverlay());
    }
    this.profileSvg = document.createElementNS(SVG_NS, 'svg');
    this.profileSvg.setAttribute('width', String(MAP_W));
    this.profileSvg.setAttribute('height', '160');
    panel.appendChild(this.profileSvg);

    el('label', panel, 'simulation frame ');
    this.frameSlider = el('input', panel);
    this.frameSlider.type = 'range';
    this.sliderHint = el('span', panel);
    this.frameSlider.addEventListener('input', () => {
      this.state.frameIndex = Number(this.frameSlider.value);
      void this.renderFrame();
    });
  }

  private pushHash(): void {
    window.history.replaceState(null, '', encodeHash(this.state));
  }

  private async loadFeature(): Promise<void> {
    const feature = this.state.feature;
    if (!feature) return;
    const [localities, contours, stats] = await Promise.all([
      this.api.localities(feature),
      this.api.contours(feature),
      this.api.frontStats(feature),
    ]);
    const markers = buildMarkers(localities);
    this.noticeBox.textContent = layerNotice(markers, feature);
    this.projection = new MapProjection(
      boundsOf(markers.map((m) => [m.lon, m.lat])),
    );

    this.markerLayer.replaceChildren();
    for (const m of markers) {
      const [x, y] = this.projection.toPx(m.lon, m.lat);
      const dot = document.createElementNS(SVG_NS, 'circle');
      dot.setAttribute('cx', String(x));
      dot.setAttribute('cy', String(y));
      dot.setAttribute('r', '3');
      dot.setAttribute('fill', m.color);
      this.markerLayer.appendChild(dot);
    }

    this.contourLayer.replaceChildren();
    for (const line of buildContourLayer(
      contours,
      this.state.levels.length ? this.state.levels : undefined,
    )) {
      for (const part of line.coordinates) {
        const poly = document.createElementNS(SVG_NS, 'polyline');
        poly.setAttribute(
          'points',
          part
            .map(([lon, lat]) => this.projection!.toPx(lon, lat).join(','))
            .join(' '),
        );
        poly.setAttribute('fill', 'none');
        poly.setAttribute('stroke', line.color);
        this.contourLayer.appendChild(poly);
      }
    }

    this.fitBox.textContent = formatFitPanel(buildFitPanel(stats));
    this.renderTraces();
    await this.refreshOverlay();
    await this.loadSimulation();
    this.pushHash();
  }

  private async onMapClick(ev: MouseEvent): Promise<void> {
    if (this.projection === null || !this.state.feature) return;
    const rect = this.svg.getBoundingClientRect();
    const [lon, lat] = this.projection.toLonLat(
      ev.clientX - rect.left,
      ev.clientY - rect.top,
    );
    try {
      const path = await this.api.traceGradientLine(
        this.state.feature,
        lon,
        lat,
      );
      this.traces.add(path);
      this.renderTraces();
    } catch (err) {
      this.showToast(traceErrorToast(err));
    }
  }

  private showToast(message: string): void {
    this.toastBox.textContent = message;
    this.toastBox.classList.add('visible');
    setTimeout(() => this.toastBox.classList.remove('visible'), 4000);
  }

  private renderTraces(): void {
    this.traceLayer.replaceChildren();
    this.tableBox.replaceChildren();
    if (this.projection === null) return;
    for (const path of this.traces.all()) {
      const poly = document.createElementNS(SVG_NS, 'polyline');
      poly.setAttribute(
        'points',
        path.geometry.coordinates
          .map(([lon, lat]) => this.projection!.toPx(lon, lat).join(','))
          .join(' '),
      );
      poly.setAttribute('fill', 'none');
      poly.setAttribute('stroke', 'black');
      this.traceLayer.appendChild(poly);

      const table = buildSegmentTable(path);
      const tbl = el('table', this.tableBox);
      const head = el('tr', el('thead', tbl));
      el('th', head, 'interval');
      el('th', head, 'delta (km)');
      const body = el('tbody', tbl);
      for (const row of table.rows) {
        const tr = el('tr', body);
        el('td', tr, `${row.from.toFixed(1)} - ${row.to.toFixed(1)}`);
        el('td', tr, row.deltaKm.toFixed(3));
      }
      const foot = el('tr', body);
      el('td', foot, `total (${table.status})`);
      el('td', foot, table.totalKm.toFixed(3));
    }
  }

  private async refreshOverlay(): Promise<void> {
    if (!this.state.feature) return;
    this.state.model = this.modelSelect.value as ViewState['model'];
    this.state.law = this.lawSelect.value as ViewState['law'];
    this.state.time = Number(this.timeSlider.value);
    this.pushHash();
    try {
      const payload = await this.api.evolution(
        this.state.feature,
        this.state.model,
        this.state.time,
        this.state.law,
      );
      const points = buildEvolutionOverlay(payload);
      const sMin = points[0].s;
      const sMax = points[points.length - 1].s;
      const px = points
        .map((p) => {
          const x = ((p.s - sMin) / (sMax - sMin || 1)) * MAP_W;
          const y = 150 - p.value * 140;
          return `${x},${y}`;
        })
        .join(' ');
      this.profileSvg.replaceChildren();
      const poly = document.createElementNS(SVG_NS, 'polyline');
      poly.setAttribute('points', px);
      poly.setAttribute('fill', 'none');
      poly.setAttribute('stroke', 'purple');
      this.profileSvg.appendChild(poly);
    } catch {
      this.profileSvg.replaceChildren();
    }
  }

  private async loadSimulation(): Promise<void> {
    if (this.state.runId === null) {
      this.manifest = null;
    } else {
      try {
        this.manifest = await this.api.simulationManifest(this.state.runId);
      } catch {
        this.manifest = null;
      }
    }
    const spec = simulationSlider(this.manifest, this.state.frameIndex);
    this.frameSlider.min = String(spec.min);
    this.frameSlider.max = String(spec.max);
    this.frameSlider.value = String(spec.value);
    this.frameSlider.disabled = spec.disabled;
    this.sliderHint.textContent = spec.hint;
    if (!spec.disabled) await this.renderFrame();
  }

  private async renderFrame(): Promise<void> {
    if (this.manifest === null || this.state.runId === null) return;
    const spec = simulationSlider(this.manifest, this.state.frameIndex);
    this.sliderHint.textContent = spec.hint;
    this.pushHash();
    const buffer = await this.api.simulationFrame(
      this.state.runId,
      spec.value,
    );
    const frame = decodeFrame(buffer, this.manifest);
    const ctx = this.heatCanvas.getContext('2d');
    if (ctx === null) return;
    const { nx, ny } = this.manifest;
    const cw = this.heatCanvas.width / nx;
    const ch = this.heatCanvas.height / ny;
    for (let iy = 0; iy < ny; iy++) {
      for (let ix = 0; ix < nx; ix++) {
        ctx.fillStyle = colorFor(frame[iy * nx + ix]);
        // row 0 is the south edge: draw bottom-up
        ctx.fillRect(
          ix * cw,
          this.heatCanvas.height - (iy + 1) * ch,
          Math.ceil(cw),
          Math.ceil(ch),
        );
      }
    }
  }
}

if (typeof document !== 'undefined') {
  const root = document.getElementById('app');
  if (root !== null) {
    void new App(root).start();
  }
}
