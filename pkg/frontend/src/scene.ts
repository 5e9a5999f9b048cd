// Three.js scene: joints as instanced spheres, bones as line segments, a
// ground grid, and a damped orbit camera.

import * as THREE from "three";
import { OrbitControls } from "three/examples/jsm/controls/OrbitControls.js";
import type { SkeletonDef } from "./fk";

const JOINT_RADIUS = 0.035;

export class SkeletonScene {
  private renderer: THREE.WebGLRenderer;
  private scene: THREE.Scene;
  private camera: THREE.PerspectiveCamera;
  private controls: OrbitControls;
  private joints: THREE.InstancedMesh | null = null;
  private bones: THREE.LineSegments | null = null;
  private boneParents: number[] = [];
  private lastPositions: number[][] | null = null;

  constructor(private canvas: HTMLCanvasElement) {
    this.renderer = new THREE.WebGLRenderer({ canvas, antialias: true });
    this.renderer.setPixelRatio(window.devicePixelRatio);
    this.scene = new THREE.Scene();
    this.scene.background = new THREE.Color(0x14161a);

    this.camera = new THREE.PerspectiveCamera(45, 1, 0.01, 100);
    this.camera.position.set(2.6, 1.6, 2.6);

    this.controls = new OrbitControls(this.camera, canvas);
    this.controls.enableDamping = true;
    this.controls.target.set(0, 0.8, 0);
    this.controls.update();

    this.scene.add(new THREE.HemisphereLight(0xdde4ee, 0x20242c, 1.1));
    const sun = new THREE.DirectionalLight(0xffffff, 1.4);
    sun.position.set(3, 6, 2);
    this.scene.add(sun);

    const grid = new THREE.GridHelper(6, 24, 0x3a4150, 0x262b33);
    this.scene.add(grid);

    this.resize();
    window.addEventListener("resize", () => this.resize());
  }

  resize(): void {
    const width = this.canvas.clientWidth || this.canvas.width;
    const height = this.canvas.clientHeight || this.canvas.height;
    if (!width || !height) return;
    this.camera.aspect = width / height;
    this.camera.updateProjectionMatrix();
    this.renderer.setSize(width, height, false);
  }

  setSkeleton(skeleton: SkeletonDef): void {
    if (this.joints) {
      this.scene.remove(this.joints);
      this.joints.dispose();
    }
    if (this.bones) {
      this.scene.remove(this.bones);
      this.bones.geometry.dispose();
    }
    const count = skeleton.jointNames.length;
    const sphere = new THREE.SphereGeometry(JOINT_RADIUS, 12, 10);
    const material = new THREE.MeshStandardMaterial({ color: 0xe8ecf4, roughness: 0.55 });
    this.joints = new THREE.InstancedMesh(sphere, material, count);
    this.scene.add(this.joints);

    this.boneParents = [];
    for (let j = 0; j < count; j++) {
      if (skeleton.parentIndex[j] >= 0) this.boneParents.push(j);
    }
    const geometry = new THREE.BufferGeometry();
    geometry.setAttribute(
      "position",
      new THREE.BufferAttribute(new Float32Array(this.boneParents.length * 6), 3),
    );
    this.bones = new THREE.LineSegments(
      geometry,
      new THREE.LineBasicMaterial({ color: 0x9ab0d0 }),
    );
    this.bones.frustumCulled = false;
    this.scene.add(this.bones);
    if (this.lastPositions && this.lastPositions.length === count) {
      this.setPose(this.lastPositions, skeleton);
    }
  }

  setPose(positions: number[][], skeleton: SkeletonDef): void {
    this.lastPositions = positions;
    if (!this.joints || !this.bones) return;
    const matrix = new THREE.Matrix4();
    for (let j = 0; j < positions.length; j++) {
      matrix.setPosition(positions[j][0], positions[j][1], positions[j][2]);
      this.joints.setMatrixAt(j, matrix);
    }
    this.joints.instanceMatrix.needsUpdate = true;

    const line = this.bones.geometry.getAttribute("position") as THREE.BufferAttribute;
    this.boneParents.forEach((j, i) => {
      const p = skeleton.parentIndex[j];
      line.setXYZ(2 * i, positions[p][0], positions[p][1], positions[p][2]);
      line.setXYZ(2 * i + 1, positions[j][0], positions[j][1], positions[j][2]);
    });
    line.needsUpdate = true;
  }

  render(): void {
    this.controls.update();
    this.renderer.render(this.scene, this.camera);
  }
}
